"""Exact solver for n-fold integer programs by Graver-style augmentation."""

from .model import NFoldInstance, SolveReport, Status
from .solver import SolverOptions, solve

__all__ = ["NFoldInstance", "SolveReport", "Status", "SolverOptions", "solve"]
