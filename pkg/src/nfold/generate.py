"""Random n-fold instances for tests and benchmarks.

Blocks get entries in ``[-delta, delta]``; a point ``z`` is drawn inside the
bounds and ``b = A z``, so generated instances are feasible unless asked
otherwise.
"""

from __future__ import annotations

import random

from .model import NEG_INF, POS_INF, NFoldInstance, apply_matrix


def random_instance(
    rng: random.Random,
    n: int,
    r: int,
    s: int,
    t: int,
    delta: int = 2,
    bound: int = 3,
    c_range: int = 5,
    max_width: int | None = None,
) -> NFoldInstance:
    """Feasible instance with finite bounds inside ``[-bound, bound]``.

    ``max_width`` caps ``upper - lower`` per variable, which keeps the box
    small enough for exhaustive oracles.
    """
    a_blocks = [[[rng.randint(-delta, delta) for _ in range(t)] for _ in range(r)] for _ in range(n)]
    b_blocks = [[[rng.randint(-delta, delta) for _ in range(t)] for _ in range(s)] for _ in range(n)]
    lower, upper = [], []
    for _ in range(n * t):
        lo = rng.randint(-bound, bound)
        hi = rng.randint(lo, bound if max_width is None else min(bound, lo + max_width))
        lower.append(lo)
        upper.append(hi)
    c = [rng.randint(-c_range, c_range) for _ in range(n * t)]
    z = [rng.randint(lo, hi) for lo, hi in zip(lower, upper)]
    proto = NFoldInstance.create(a_blocks, b_blocks, c, [0] * (r + n * s), lower, upper)
    return proto.replace(b=apply_matrix(proto, z))


def perturb_rhs(rng: random.Random, inst: NFoldInstance, spread: int = 2) -> NFoldInstance:
    """Same instance with a random right-hand side (often infeasible)."""
    b = tuple(v + rng.randint(-spread, spread) for v in inst.b)
    return inst.replace(b=b)


def with_infinite_bounds(
    rng: random.Random,
    inst: NFoldInstance,
    fraction: float = 0.2,
    dual_range: int = 1,
    c_range: int = 5,
    attempts: int = 200,
) -> NFoldInstance | None:
    """Open up about ``fraction`` of the bounds while keeping the optimum finite.

    The objective is rebuilt as ``c = A^T pi + mu`` with ``mu <= 0`` on
    variables unbounded above, ``mu >= 0`` on variables unbounded below and
    ``mu = 0`` on free variables.  Then ``c.x = pi.b + mu.x`` is bounded over
    the feasible set.  Returns ``None`` if no such ``c`` fits in
    ``[-c_range, c_range]`` within ``attempts`` draws.
    """
    lower = list(inst.lower)
    upper = list(inst.upper)
    for j in range(inst.num_vars):
        if rng.random() < fraction:
            lower[j] = NEG_INF
        if rng.random() < fraction:
            upper[j] = POS_INF
    dense = inst.dense_matrix()
    rows = len(dense)
    for _ in range(attempts):
        pi = [rng.randint(-dual_range, dual_range) for _ in range(rows)]
        c = []
        for j in range(inst.num_vars):
            base = sum(dense[i][j] * pi[i] for i in range(rows))
            lo_open, up_open = lower[j] == NEG_INF, upper[j] == POS_INF
            if lo_open and up_open:
                mu = 0
            elif up_open:
                mu = -rng.randint(0, 2)
            elif lo_open:
                mu = rng.randint(0, 2)
            else:
                mu = rng.randint(-2, 2)
            c.append(base + mu)
        if all(abs(v) <= c_range for v in c):
            return inst.replace(c=tuple(c), lower=tuple(lower), upper=tuple(upper))
    return None
