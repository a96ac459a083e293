"""Brute-force ground truth for small instances.

Nothing here shares code with the solver beyond the instance type and the
dense matrix it exposes.  Enumeration is vectorised with numpy but remains
exhaustive: every candidate lattice point is generated and checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .model import NFoldInstance
from .splitter import Partition

DEFAULT_BUDGET = 2_000_000


class OracleStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class OracleResult:
    status: OracleStatus
    value: int | None = None
    x: tuple[int, ...] | None = None


def _box_size(lower: Sequence[int], upper: Sequence[int]) -> int:
    size = 1
    for lo, up in zip(lower, upper):
        size *= int(up - lo + 1)
    return size


def _grid(lower: Sequence[int], upper: Sequence[int]) -> np.ndarray:
    """Every integer point of the box as rows of an ``int64`` array (lexicographic order)."""
    axes = [np.arange(int(lo), int(up) + 1, dtype=np.int64) for lo, up in zip(lower, upper)]
    if not axes:
        return np.zeros((1, 0), dtype=np.int64)
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _brick_points(inst: NFoldInstance, i: int, lower, upper) -> np.ndarray:
    """Points of brick ``i``'s box satisfying ``B_i x = b_i``."""
    sl = inst.brick_slice(i)
    pts = _grid(lower[sl], upper[sl])
    bmat = np.array(inst.b_blocks[i], dtype=np.int64).reshape(inst.s, inst.t)
    rhs = np.array(inst.b[inst.r + i * inst.s: inst.r + (i + 1) * inst.s], dtype=np.int64)
    ok = np.all(pts @ bmat.T == rhs, axis=1)
    return pts[ok]


def feasible_points(inst: NFoldInstance, budget: int = DEFAULT_BUDGET) -> np.ndarray | None:
    """All feasible points, one per row in lexicographic order; ``None`` past the budget.

    Each brick's box is enumerated and filtered by its own rows; the product
    of the survivors is then filtered by the top rows.  A point failing its
    brick rows is infeasible anyway, so nothing is skipped.
    """
    if not inst.has_finite_bounds():
        raise ValueError("brute force needs finite bounds")
    if any(lo > up for lo, up in zip(inst.lower, inst.upper)):
        return np.zeros((0, inst.num_vars), dtype=np.int64)
    per_brick = []
    work = 0
    for i in range(inst.n):
        sl = inst.brick_slice(i)
        work += _box_size(inst.lower[sl], inst.upper[sl])
        if work > budget:
            return None
        per_brick.append(_brick_points(inst, i, inst.lower, inst.upper))
    total = 1
    for pts in per_brick:
        total *= len(pts)
    if total > budget:
        return None
    if total == 0:
        return np.zeros((0, inst.num_vars), dtype=np.int64)

    top_rhs = np.array(inst.b[: inst.r], dtype=np.int64)
    # combine brick by brick, carrying the top-row partial sums
    acc_x = np.zeros((1, 0), dtype=np.int64)
    acc_top = np.zeros((1, inst.r), dtype=np.int64)
    for i, pts in enumerate(per_brick):
        amat = np.array(inst.a_blocks[i], dtype=np.int64).reshape(inst.r, inst.t)
        contrib = pts @ amat.T
        m, p = len(acc_x), len(pts)
        acc_x = np.concatenate([np.repeat(acc_x, p, axis=0), np.tile(pts, (m, 1))], axis=1)
        acc_top = np.repeat(acc_top, p, axis=0) + np.tile(contrib, (m, 1))
    ok = np.all(acc_top == top_rhs, axis=1)
    return acc_x[ok]


def brute_force_solve(inst: NFoldInstance, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exhaustive maximisation; ties go to the lexicographically smallest optimizer."""
    pts = feasible_points(inst, budget)
    if pts is None:
        return OracleResult(OracleStatus.BUDGET_EXCEEDED)
    if len(pts) == 0:
        return OracleResult(OracleStatus.INFEASIBLE)
    values = pts @ np.array(inst.c, dtype=np.int64)
    best = values.max()
    winners = pts[values == best]
    # feasible_points emits rows in lexicographic order
    return OracleResult(OracleStatus.OPTIMAL, int(best), tuple(int(v) for v in winners[0]))


def naive_box_solve(inst: NFoldInstance, budget: int = 200_000) -> OracleResult:
    """Plain whole-box enumeration with the dense matrix (cross-check for tiny boxes)."""
    if _box_size(inst.lower, inst.upper) > budget:
        return OracleResult(OracleStatus.BUDGET_EXCEEDED)
    pts = _grid(inst.lower, inst.upper)
    dense = np.array(inst.dense_matrix(), dtype=np.int64)
    ok = np.all(pts @ dense.T == np.array(inst.b, dtype=np.int64), axis=1)
    pts = pts[ok]
    if len(pts) == 0:
        return OracleResult(OracleStatus.INFEASIBLE)
    values = pts @ np.array(inst.c, dtype=np.int64)
    best = values.max()
    return OracleResult(OracleStatus.OPTIMAL, int(best), tuple(int(v) for v in pts[values == best][0]))


def dp_solve(inst: NFoldInstance, budget: int = DEFAULT_BUDGET) -> OracleResult:
    """Exhaustive search for boxes too large to enumerate jointly.

    Every brick's box is enumerated in full; bricks are then combined by an
    exact table over top-row partial sums, so the joint box never has to be
    materialised.  Same answers as :func:`brute_force_solve`, including the
    lexicographic tie-break.
    """
    if not inst.has_finite_bounds():
        raise ValueError("brute force needs finite bounds")
    states: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {(0,) * inst.r: (0, ())}
    c = np.array(inst.c, dtype=np.int64)
    work = 0
    for i in range(inst.n):
        sl = inst.brick_slice(i)
        work += _box_size(inst.lower[sl], inst.upper[sl])
        if work > budget:
            return OracleResult(OracleStatus.BUDGET_EXCEEDED)
        pts = _brick_points(inst, i, inst.lower, inst.upper)
        amat = np.array(inst.a_blocks[i], dtype=np.int64).reshape(inst.r, inst.t)
        tops = [tuple(int(v) for v in row) for row in pts @ amat.T]
        vals = [int(v) for v in pts @ c[sl]]
        xs = [tuple(int(v) for v in row) for row in pts]
        # best (value, lexicographically smallest) point per top contribution
        options: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
        for top, val, x in zip(tops, vals, xs):
            cur = options.get(top)
            if cur is None or val > cur[0] or (val == cur[0] and x < cur[1]):
                options[top] = (val, x)
        nxt: dict[tuple[int, ...], tuple[int, tuple[int, ...]]] = {}
        for s_key, (s_val, s_x) in states.items():
            for top, (val, x) in options.items():
                key = tuple(a + b for a, b in zip(s_key, top))
                cand = (s_val + val, s_x + x)
                cur = nxt.get(key)
                if cur is None or cand[0] > cur[0] or (cand[0] == cur[0] and cand[1] < cur[1]):
                    nxt[key] = cand
        work += len(states) * len(options)
        if work > budget:
            return OracleResult(OracleStatus.BUDGET_EXCEEDED)
        states = nxt
    hit = states.get(tuple(inst.b[: inst.r]))
    if hit is None:
        return OracleResult(OracleStatus.INFEASIBLE)
    return OracleResult(OracleStatus.OPTIMAL, hit[0], hit[1])


def milp_solve(inst: NFoldInstance, time_limit: float = 60.0) -> OracleResult:
    """Branch-and-bound via HiGHS for boxes far too large to enumerate.

    The gap tolerance is zero and the returned point is re-checked in exact
    integer arithmetic, so a numerical slip raises instead of passing as an
    answer.  Values must stay below 2**53 to survive the float conversion.
    Ties are not broken lexicographically; compare values, not points.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp

    if not inst.has_finite_bounds():
        raise ValueError("milp_solve needs finite bounds")
    limit = 2**53
    if any(abs(v) >= limit for v in inst.lower + inst.upper + inst.b):
        return OracleResult(OracleStatus.BUDGET_EXCEEDED)
    dense = np.array(inst.dense_matrix(), dtype=float).reshape(inst.num_rows, inst.num_vars)
    rhs = np.array(inst.b, dtype=float)
    res = milp(
        -np.array(inst.c, dtype=float),
        constraints=LinearConstraint(dense, rhs, rhs) if inst.num_rows else (),
        integrality=np.ones(inst.num_vars),
        bounds=Bounds(np.array(inst.lower, dtype=float), np.array(inst.upper, dtype=float)),
        options={"mip_rel_gap": 0.0, "time_limit": time_limit},
    )
    if res.status == 2:
        return OracleResult(OracleStatus.INFEASIBLE)
    if res.status != 0:
        return OracleResult(OracleStatus.BUDGET_EXCEEDED)
    x = tuple(int(round(v)) for v in res.x)
    ok_bounds = all(lo <= v <= up for v, lo, up in zip(x, inst.lower, inst.upper))
    rows = [sum(a * v for a, v in zip(row, x)) for row in inst.dense_matrix()]
    if not ok_bounds or tuple(rows) != tuple(inst.b):
        raise RuntimeError("HiGHS returned a point that is not exactly feasible")
    return OracleResult(OracleStatus.OPTIMAL, sum(ci * v for ci, v in zip(inst.c, x)), x)


# -- best steps ---------------------------------------------------------------


def _brick_steps(inst: NFoldInstance, brick: int, lbar, ubar, k: int) -> list[tuple[tuple[int, ...], int, tuple[int, ...]]]:
    """``(top image, gain, y)`` for every in-bounds ``y`` with ``|y|_1 <= k`` and ``B y = 0``."""
    sl = inst.brick_slice(brick)
    ranges = [range(max(lo, -k), min(up, k) + 1) for lo, up in zip(lbar[sl], ubar[sl])]
    out = []
    for y in itertools.product(*ranges):
        if sum(abs(v) for v in y) > k:
            continue
        if any(sum(a * v for a, v in zip(row, y)) for row in inst.b_blocks[brick]):
            continue
        top = tuple(sum(a * v for a, v in zip(row, y)) for row in inst.a_blocks[brick])
        gain = sum(ci * v for ci, v in zip(inst.c[sl], y))
        out.append((top, gain, y))
    return out


def enumerate_best_step(
    inst: NFoldInstance,
    partition: Partition,
    k: int,
    lbar: Sequence[int],
    ubar: Sequence[int],
) -> int:
    """Optimal (P, k)-best-step gain by exhaustive enumeration of per-class choices."""
    zero = (0,) * inst.r
    reach: dict[tuple[int, ...], int] = {zero: 0}
    for members in partition.classes():
        choices: dict[tuple[int, ...], int] = {zero: 0}
        for brick in members:
            for top, gain, _y in _brick_steps(inst, brick, lbar, ubar, k):
                if gain > choices.get(top, gain - 1):
                    choices[top] = gain
        nxt: dict[tuple[int, ...], int] = {}
        for acc, val in reach.items():
            for top, gain in choices.items():
                key = tuple(a + b for a, b in zip(acc, top))
                if val + gain > nxt.get(key, val + gain - 1):
                    nxt[key] = val + gain
        reach = nxt
    return reach.get(zero, 0)


def enumerate_brick_table(a_block, b_block, c_prime, lower_prime, upper_prime, k: int) -> dict:
    """``top value -> best gain`` over all ``x`` with ``|x|_1 <= k`` in the bounds, ``B x = 0``."""
    out: dict[tuple[int, ...], int] = {}
    ranges = [range(max(lo, -k), min(up, k) + 1) for lo, up in zip(lower_prime, upper_prime)]
    for x in itertools.product(*ranges):
        if sum(abs(v) for v in x) > k:
            continue
        if any(sum(a * v for a, v in zip(row, x)) for row in b_block):
            continue
        top = tuple(sum(a * v for a, v in zip(row, x)) for row in a_block)
        gain = sum(c * v for c, v in zip(c_prime, x))
        if top not in out or gain > out[top]:
            out[top] = gain
    return out


# -- Graver norms -------------------------------------------------------------


def _graver_filter(elements: np.ndarray) -> np.ndarray:
    """Keep the conformally minimal rows (input sorted by l1-norm)."""
    kept: list[np.ndarray] = []
    stack = np.zeros((0, elements.shape[1]), dtype=np.int64)
    for g in elements:
        if len(stack):
            conformal = np.all(stack * g >= 0, axis=1) & np.all(np.abs(stack) <= np.abs(g), axis=1)
            if conformal.any():
                continue
        kept.append(g)
        stack = np.vstack([stack, g[None, :]])
    return stack


def kernel_elements(inst: NFoldInstance, norm_cap: int, radii: Sequence[int] | None = None) -> np.ndarray:
    """Every nonzero ``g`` with ``A g = 0`` and ``|g|_1 <= norm_cap`` (optionally ``|g_j| <= radii[j]``)."""
    t = inst.t
    per_brick = []
    for i in range(inst.n):
        rad = [norm_cap] * t if radii is None else [min(norm_cap, radii[i * t + j]) for j in range(t)]
        vecs = []
        for v in itertools.product(*[range(-w, w + 1) for w in rad]):
            nrm = sum(abs(a) for a in v)
            if nrm > norm_cap:
                continue
            if any(sum(a * x for a, x in zip(row, v)) for row in inst.b_blocks[i]):
                continue
            top = tuple(sum(a * x for a, x in zip(row, v)) for row in inst.a_blocks[i])
            vecs.append((nrm, top, v))
        vecs.sort()
        per_brick.append(vecs)
    delta_a = max((abs(a) for blk in inst.a_blocks for row in blk for a in row), default=0)
    found: list[tuple[int, ...]] = []

    def dfs(i: int, norm: int, top: tuple[int, ...], parts: list) -> None:
        if any(abs(v) > delta_a * (norm_cap - norm) for v in top):
            return
        if i == inst.n:
            if norm and not any(top):
                found.append(tuple(x for p in parts for x in p))
            return
        for nrm, ptop, v in per_brick[i]:
            if norm + nrm > norm_cap:
                break
            parts.append(v)
            dfs(i + 1, norm + nrm, tuple(a + b for a, b in zip(top, ptop)), parts)
            parts.pop()

    dfs(0, 0, (0,) * inst.r, [])
    if not found:
        return np.zeros((0, inst.num_vars), dtype=np.int64)
    arr = np.array(found, dtype=np.int64)
    order = np.argsort(np.abs(arr).sum(axis=1), kind="stable")
    return arr[order]


def graver_elements(inst: NFoldInstance, norm_cap: int, radii: Sequence[int] | None = None) -> np.ndarray:
    """Graver basis elements of the constraint matrix with l1-norm at most ``norm_cap``."""
    return _graver_filter(kernel_elements(inst, norm_cap, radii))


def max_graver_norm(inst: NFoldInstance, norm_cap: int, radii: Sequence[int] | None = None) -> int:
    """Largest l1-norm among Graver elements found up to ``norm_cap`` (0 if none)."""
    g = graver_elements(inst, norm_cap, radii)
    return int(np.abs(g).sum(axis=1).max()) if len(g) else 0


def feasible_diameter(inst: NFoldInstance, budget: int = DEFAULT_BUDGET) -> int:
    """Largest l1 distance between two feasible points (-1 past the budget, 0 if infeasible)."""
    pts = feasible_points(inst, budget)
    if pts is None:
        return -1
    if len(pts) <= 1:
        return 0
    return int(max(np.abs(pts - p).sum(axis=1).max() for p in pts))


def exact_norm_budget(inst: NFoldInstance, budget: int = DEFAULT_BUDGET) -> int:
    """A norm budget ``k`` under which augmentation is exact on ``inst``.

    Every Graver element in a conformal decomposition of ``x* - x`` satisfies
    ``|g_j| <= u_j - l_j`` and ``|g|_1 <= |x* - x|_1 <= diameter``, so the
    largest Graver norm over those radii, capped at the diameter, suffices.
    Returns -1 when the feasible set exceeds the budget.
    """
    diam = feasible_diameter(inst, budget)
    if diam < 0:
        return -1
    radii = [int(u - l) for l, u in zip(inst.lower, inst.upper)]
    return max_graver_norm(inst, diam, radii)
