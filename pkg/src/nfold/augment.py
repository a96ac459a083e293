"""Augmentation loop: repeatedly apply the best step over all step lengths and partitions.

For every step length ``lam`` in ``1, 2, 4, ..., 2^floor(log2 Gamma)`` and
every partition of a splitter family one :class:`StepGraph` is maintained.
Each iteration takes the step ``lam * y`` with the largest gain, applies it,
and refreshes only the bricks the step touched.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

from .brick import BrickGainTable
from .model import NFoldInstance, objective, within_bounds
from .splitter import SplitterFamily, build_fks_family
from .step_graph import BestStep, StepConfig, StepGraph, brick_table

log = logging.getLogger(__name__)

DEFAULT_ITERATION_CONSTANT = 64
DEFAULT_K_CAP = 8


class ConvergenceError(RuntimeError):
    """The iteration cap was hit before an optimal point was certified."""

    def __init__(self, message: str, x: Sequence[int], iterations: int):
        super().__init__(message)
        self.x = tuple(x)
        self.iterations = iterations


class InfeasibleStepError(AssertionError):
    """An applied step broke feasibility; this is always a bug."""


def default_k(inst: NFoldInstance, cap: int = DEFAULT_K_CAP) -> int:
    """``min(cap, (2 r s Delta + 2)^(r s + 1))``."""
    rs = inst.r * inst.s
    return min(cap, (2 * rs * inst.delta() + 2) ** (rs + 1))


def lambda_guesses(gamma: int) -> list[int]:
    """Step lengths ``2^0 .. 2^floor(log2 gamma)``; just ``[1]`` when ``gamma <= 1``."""
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    if gamma <= 1:
        return [1]
    return [1 << e for e in range(gamma.bit_length())]


def step_bounds(inst: NFoldInstance, x: Sequence[int], lam: int) -> tuple[list[int], list[int]]:
    """``ceil((lower - x) / lam)`` and ``floor((upper - x) / lam)``, exactly."""
    lbar = [-((xi - lo) // lam) for lo, xi in zip(inst.lower, x)]
    ubar = [(up - xi) // lam for up, xi in zip(inst.upper, x)]
    return lbar, ubar


def iteration_cap(inst: NFoldInstance, constant: int = DEFAULT_ITERATION_CONSTANT) -> int:
    """``constant * n t * (L + log2(n t (Gamma + 1)))``, rounded up."""
    nt = inst.num_vars
    bound = nt * (inst.encoding_length() + math.log2(nt * (inst.gamma() + 1)))
    return math.ceil(constant * bound)


@dataclass
class LoopResult:
    x: tuple[int, ...]
    iterations: int
    objective: int
    gains: list[int] = field(default_factory=list)
    k: int = 0
    gamma: int = 0
    family_size: int = 0
    num_graphs: int = 0


class AugmentLoop:
    """Mutable optimisation state: the current point plus every step graph."""

    def __init__(
        self,
        inst: NFoldInstance,
        x0: Sequence[int],
        k: int,
        family: SplitterFamily | None = None,
        rebuild: bool = False,
    ):
        if not inst.has_finite_bounds():
            raise ValueError("the augmentation loop needs finite bounds")
        if not within_bounds(inst, x0):
            raise ValueError("starting point violates the bounds")
        self.inst = inst
        self.k = k
        self.family = family if family is not None else build_fks_family(inst.n, max(k, 1))
        self.rebuild = rebuild
        self.x = list(x0)
        self.gamma = inst.gamma()
        self.lambdas = lambda_guesses(self.gamma)
        self.iterations = 0
        self.gains: list[int] = []
        self.graphs: dict[tuple[int, int], StepGraph] = {}
        # bounds only matter up to +-k, so many step lengths share a brick table
        self._memo: dict[tuple, BrickGainTable] = {}
        self._build_all()

    def _tables(self, lam: int, bricks: Sequence[int]) -> dict[int, BrickGainTable]:
        t = self.inst.t
        k = self.k
        lbar, ubar = step_bounds(self.inst, self.x, lam)
        if len(self._memo) > 50_000:
            self._memo.clear()
        out = {}
        for i in bricks:
            lo = tuple(max(v, -k) for v in lbar[i * t:(i + 1) * t])
            up = tuple(min(v, k) for v in ubar[i * t:(i + 1) * t])
            key = (i, lo, up)
            table = self._memo.get(key)
            if table is None:
                table = self._memo[key] = brick_table(self.inst, i, lo, up, k)
            out[i] = table
        return out

    def _build_all(self) -> None:
        self.graphs.clear()
        for lam in self.lambdas:
            lbar, ubar = step_bounds(self.inst, self.x, lam)
            tables = self._tables(lam, range(self.inst.n))
            ordered = [tables[i] for i in range(self.inst.n)]
            for pid, part in enumerate(self.family.partitions):
                cfg = StepConfig(part, self.k, tuple(lbar), tuple(ubar))
                self.graphs[(pid, lam)] = StepGraph(self.inst, cfg, ordered)

    def best(self) -> tuple[int, int, int, BestStep]:
        """``(total gain, lam, partition id, step)`` of the best step over all graphs.

        Ties keep the smallest ``lam`` and then the smallest partition id.
        """
        best: tuple[int, int, int, BestStep] | None = None
        for lam in self.lambdas:
            for pid in range(len(self.family.partitions)):
                step = self.graphs[(pid, lam)].best_step()
                total = lam * step.gain
                if best is None or total > best[0]:
                    best = (total, lam, pid, step)
        assert best is not None
        return best

    def iterate(self) -> tuple[bool, tuple[int, ...]]:
        """Apply one augmenting step; ``(False, 0)`` when none improves."""
        total, lam, _pid, step = self.best()
        n, t = self.inst.n, self.inst.t
        if total <= 0:
            return False, (0,) * (n * t)
        applied = tuple(lam * v for v in step.y)
        changed = sorted({j // t for j, v in enumerate(applied) if v})
        self._check_step(applied, changed)
        for j, v in enumerate(applied):
            if v:
                self.x[j] += v
        self.iterations += 1
        self.gains.append(total)
        if self.rebuild:
            self._build_all()
        else:
            for lam_g in self.lambdas:
                lbar, ubar = step_bounds(self.inst, self.x, lam_g)
                tables = self._tables(lam_g, changed)
                for pid in range(len(self.family.partitions)):
                    graph = self.graphs[(pid, lam_g)]
                    for i in changed:
                        sl = slice(i * t, (i + 1) * t)
                        graph.update_brick(i, lbar[sl], ubar[sl], tables[i])
        return True, applied

    def _check_step(self, step: Sequence[int], changed: Sequence[int]) -> None:
        inst = self.inst
        t = inst.t
        top = [0] * inst.r
        for i in changed:
            yi = step[i * t:(i + 1) * t]
            for row in inst.b_blocks[i]:
                if sum(a * v for a, v in zip(row, yi)):
                    raise InfeasibleStepError(f"step leaves kern(B_{i})")
            for ri, row in enumerate(inst.a_blocks[i]):
                top[ri] += sum(a * v for a, v in zip(row, yi))
            for j in range(i * t, (i + 1) * t):
                if not inst.lower[j] <= self.x[j] + step[j] <= inst.upper[j]:
                    raise InfeasibleStepError(f"step pushes x[{j}] out of bounds")
        if any(top):
            raise InfeasibleStepError("step leaves the kernel of the top rows")

    def run(self, max_iterations: int | None = None) -> LoopResult:
        cap = iteration_cap(self.inst) if max_iterations is None else max_iterations
        while True:
            improved, _ = self.iterate()
            if not improved:
                break
            if self.iterations > cap:
                raise ConvergenceError(
                    f"no convergence after {cap} iterations", self.x, self.iterations
                )
        log.debug("converged after %d iterations", self.iterations)
        return LoopResult(
            x=tuple(self.x),
            iterations=self.iterations,
            objective=objective(self.inst, self.x),
            gains=list(self.gains),
            k=self.k,
            gamma=self.gamma,
            family_size=len(self.family),
            num_graphs=len(self.graphs),
        )


def run(
    inst: NFoldInstance,
    x0: Sequence[int],
    k: int,
    family: SplitterFamily | None = None,
    max_iterations: int | None = None,
    rebuild: bool = False,
) -> LoopResult:
    return AugmentLoop(inst, x0, k, family, rebuild).run(max_iterations)
