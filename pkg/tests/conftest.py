import random

import pytest

from nfold.model import NFoldInstance


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def tiny():
    """One brick, x1 + x2 = 3 on top, x1 - x2 = 1 below."""
    return NFoldInstance.create([[[1, 1]]], [[[1, -1]]], [1, 2], [3, 1], [0, 0], [3, 3])
