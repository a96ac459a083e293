"""Phase one: find a feasible point through an auxiliary n-fold with slack columns.

Every brick gets ``r + s`` extra columns.  In brick 0 the first ``r`` of them
form an identity on the top rows; in later bricks they are all-zero and fixed
to 0.  The last ``s`` columns of brick ``i`` form an identity on the rows of
``B_i``.  After shifting the original variables to ``[0, upper - lower]`` the
slack columns alone satisfy ``b' = b - A lower``; each slack is sign-restricted
towards ``b'`` and penalised by one unit per unit used, so the auxiliary
optimum is 0 exactly when the original problem is feasible.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from .augment import DEFAULT_K_CAP, AugmentLoop, default_k, iteration_cap
from .model import NFoldInstance, apply_matrix, objective
from .splitter import build_fks_family

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitEmbedding:
    original: NFoldInstance
    init_instance: NFoldInstance
    shift: tuple[int, ...]
    rhs: tuple[int, ...]

    def init_index(self, j: int) -> int:
        """Position of original variable ``j`` inside the auxiliary instance."""
        brick, local = divmod(j, self.original.t)
        return brick * self.init_instance.t + local

    def slack_index(self, row: int) -> int:
        """Auxiliary variable carrying the slack of constraint ``row``."""
        inst = self.original
        t2 = self.init_instance.t
        if row < inst.r:
            return inst.t + row
        brick, local = divmod(row - inst.r, inst.s)
        return brick * t2 + inst.t + inst.r + local


def build_init_instance(inst: NFoldInstance) -> InitEmbedding:
    if not inst.has_finite_bounds():
        raise ValueError("phase one needs finite bounds; synthesize them first")
    n, r, s, t = inst.n, inst.r, inst.s, inst.t
    shift = tuple(int(v) for v in inst.lower)
    rhs = tuple(bi - v for bi, v in zip(inst.b, apply_matrix(inst, shift)))

    def slack(value: int) -> tuple[int, int, int]:
        # (objective, lower, upper)
        return (-1, 0, value) if value >= 0 else (1, value, 0)

    a_blocks, b_blocks = [], []
    c: list[int] = []
    lower: list[int] = []
    upper: list[int] = []
    for i in range(n):
        a_new = []
        for row in range(r):
            ident = [1 if (i == 0 and q == row) else 0 for q in range(r)]
            a_new.append(list(inst.a_blocks[i][row]) + ident + [0] * s)
        b_new = []
        for row in range(s):
            b_new.append(list(inst.b_blocks[i][row]) + [0] * r + [1 if q == row else 0 for q in range(s)])
        a_blocks.append(a_new)
        b_blocks.append(b_new)

        sl = inst.brick_slice(i)
        c.extend([0] * t)
        lower.extend([0] * t)
        upper.extend(int(u - l) for l, u in zip(inst.lower[sl], inst.upper[sl]))
        for row in range(r):
            if i == 0:
                cj, lo, up = slack(rhs[row])
            else:
                cj, lo, up = 0, 0, 0
            c.append(cj)
            lower.append(lo)
            upper.append(up)
        for row in range(s):
            cj, lo, up = slack(rhs[r + i * s + row])
            c.append(cj)
            lower.append(lo)
            upper.append(up)

    init = NFoldInstance.create(a_blocks, b_blocks, c, rhs, lower, upper)
    return InitEmbedding(inst, init, shift, rhs)


def initial_point(embedding: InitEmbedding) -> tuple[int, ...]:
    """Slack-only solution: every slack carries its row of ``b'``."""
    x = [0] * embedding.init_instance.num_vars
    for row, value in enumerate(embedding.rhs):
        x[embedding.slack_index(row)] = value
    return tuple(x)


def extract(embedding: InitEmbedding, init_solution: Sequence[int]) -> tuple[int, ...] | None:
    """Original feasible point from an optimal auxiliary point, or ``None`` if infeasible."""
    if objective(embedding.init_instance, init_solution) != 0:
        return None
    orig = embedding.original
    return tuple(
        init_solution[embedding.init_index(j)] + embedding.shift[j] for j in range(orig.num_vars)
    )


@dataclass
class PhaseOneResult:
    embedding: InitEmbedding
    x: tuple[int, ...] | None
    init_solution: tuple[int, ...]
    iterations: int = 0
    gains: list[int] = field(default_factory=list)
    k_used: list[int] = field(default_factory=list)
    gamma: int = 0
    family_size: int = 0

    @property
    def feasible(self) -> bool:
        return self.x is not None


def solve_phase_one(
    inst: NFoldInstance,
    k_init: int | None = None,
    k_cap: int = DEFAULT_K_CAP,
    growth: int = 4,
    max_iterations: int | None = None,
    iteration_constant: int | None = None,
    rebuild: bool = False,
) -> PhaseOneResult:
    """Find a feasible point of ``inst`` (finite bounds) or decide there is none.

    With ``k_init`` unset the budget starts at the formula default for the
    auxiliary instance and doubles, continuing from the stuck point, while
    the auxiliary optimum is still negative, up to the default for
    ``k_cap * growth``.  A fixed ``k_init`` disables the doubling.
    """
    emb = build_init_instance(inst)
    init = emb.init_instance
    if k_init is not None:
        k, k_top = k_init, k_init
    else:
        k = default_k(init, k_cap)
        k_top = default_k(init, k_cap * growth)
    if max_iterations is None:
        max_iterations = iteration_cap(init) if iteration_constant is None else iteration_cap(init, iteration_constant)
    point = initial_point(emb)
    out = PhaseOneResult(emb, None, point, gamma=init.gamma())
    while True:
        loop = AugmentLoop(init, point, k, build_fks_family(init.n, max(k, 1)), rebuild=rebuild)
        res = loop.run(max_iterations)
        point = res.x
        out.iterations += res.iterations
        out.gains += res.gains
        out.k_used.append(k)
        out.family_size = res.family_size
        if res.objective == 0 or k >= k_top:
            break
        log.debug("phase one stuck at %s with k=%d, doubling", res.objective, k)
        k = min(2 * k, k_top)
    out.init_solution = point
    out.x = extract(emb, point)
    return out
