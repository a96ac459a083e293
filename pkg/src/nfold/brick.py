"""Single-brick bounded-norm IPs, solved for every top-row right-hand side at once.

For one brick the step-graph needs, for every ``d`` with ``|d|_inf <= k*Delta``,

    max c'.x  s.t.  A x = d,  B x = 0,  |x|_1 <= k,  lower' <= x <= upper'

The table is produced by one exact dynamic program over states
``(units used, A x, B x)``, after throwing away variables that can never be
needed: among variables with identical stacked columns only the ``k`` best
in each direction can appear in an optimal solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .model import Matrix, Vector


@dataclass(frozen=True)
class BrickProblem:
    a_block: Matrix
    b_block: Matrix
    c_prime: Vector
    lower_prime: Vector
    upper_prime: Vector
    k: int

    def __post_init__(self) -> None:
        for lo, up in zip(self.lower_prime, self.upper_prime):
            if not lo <= 0 <= up:
                raise ValueError(f"step bounds must contain 0, got [{lo}, {up}]")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    @property
    def t(self) -> int:
        return len(self.c_prime)

    def stacked_column(self, j: int) -> Vector:
        return tuple(row[j] for row in self.a_block) + tuple(row[j] for row in self.b_block)


class Candidate(NamedTuple):
    index: int
    direction: int  # +1 or -1
    capacity: int


@dataclass
class BrickGainTable:
    """``entries[d] = (gain, witness)`` for every reachable top-row value ``d``."""

    entries: dict[Vector, tuple[int, Vector]] = field(default_factory=dict)

    def gain(self, d: Vector) -> int | None:
        hit = self.entries.get(d)
        return None if hit is None else hit[0]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Vector]:
        return iter(self.entries)

    def __eq__(self, other) -> bool:
        return isinstance(other, BrickGainTable) and self.entries == other.entries


def reduce_candidates(problem: BrickProblem) -> list[Candidate]:
    """Keep, per distinct stacked column, the ``k`` best movers in each direction.

    Positive movers need ``upper' > 0`` and are ranked by largest ``c'``;
    negative movers need ``lower' < 0`` and are ranked by smallest ``c'``.
    Ties go to the smaller index.  Capacities are clipped to ``k``.
    """
    k = problem.k
    if k == 0:
        return []
    groups: dict[Vector, list[int]] = {}
    for j in range(problem.t):
        groups.setdefault(problem.stacked_column(j), []).append(j)

    out: list[Candidate] = []
    c = problem.c_prime
    for members in groups.values():
        pos = sorted((j for j in members if problem.upper_prime[j] > 0), key=lambda j: (-c[j], j))
        neg = sorted((j for j in members if problem.lower_prime[j] < 0), key=lambda j: (c[j], j))
        out.extend(Candidate(j, 1, min(problem.upper_prime[j], k)) for j in pos[:k])
        out.extend(Candidate(j, -1, min(-problem.lower_prime[j], k)) for j in neg[:k])
    out.sort()
    return out


def _value_ranges(problem: BrickProblem, candidates: list[Candidate]) -> dict[int, tuple[int, int]]:
    ranges: dict[int, tuple[int, int]] = {}
    for cand in candidates:
        lo, hi = ranges.get(cand.index, (0, 0))
        if cand.direction > 0:
            hi = cand.capacity
        else:
            lo = -cand.capacity
        ranges[cand.index] = (lo, hi)
    return ranges


def _pareto(states: dict) -> dict:
    """Drop states beaten by one with the same image, fewer units and a better (gain, witness).

    Later variables extend both witnesses identically, so the comparison made
    now is the comparison at the end.
    """
    by_vec: dict[Vector, list] = {}
    for (units, vec), (gain, wit) in states.items():
        by_vec.setdefault(vec, []).append((units, -gain, wit))
    out = {}
    for vec, items in by_vec.items():
        items.sort()
        best = None
        for units, neg_gain, wit in items:
            if best is None or (neg_gain, wit) < best:
                best = (neg_gain, wit)
                out[(units, vec)] = (-neg_gain, wit)
    return out


def build_gain_table(problem: BrickProblem, reduce: bool = True) -> BrickGainTable:
    """Exact gain table of ``problem`` for every reachable top-row value.

    Among witnesses of equal gain the lexicographically smallest (over the
    variables the DP was allowed to use) is kept.  ``reduce=False`` skips
    candidate reduction; the result has the same gains.
    """
    t = problem.t
    r = len(problem.a_block)
    k = problem.k
    zero_vec = (0,) * (r + len(problem.b_block))
    zero_x = (0,) * t
    if reduce:
        ranges = _value_ranges(problem, reduce_candidates(problem))
    else:
        ranges = {
            j: (max(problem.lower_prime[j], -k), min(problem.upper_prime[j], k))
            for j in range(t)
            if problem.lower_prime[j] < 0 or problem.upper_prime[j] > 0
        }
    order = sorted(j for j, (lo, hi) in ranges.items() if lo < hi and k > 0)

    bottom_delta = max((abs(v) for row in problem.b_block for v in row), default=0)

    # state (units, column image) -> (gain, witness)
    states: dict[tuple[int, Vector], tuple[int, Vector]] = {(0, zero_vec): (0, zero_x)}
    for j in order:
        lo, hi = ranges[j]
        col = problem.stacked_column(j)
        cj = problem.c_prime[j]
        nxt: dict[tuple[int, Vector], tuple[int, Vector]] = {}
        for (units, vec), (gain, wit) in states.items():
            budget = k - units
            for v in range(max(lo, -budget), min(hi, budget) + 1):
                used = units + abs(v)
                if v:
                    new_vec = tuple([a + v * b for a, b in zip(vec, col)])
                    if bottom_delta:
                        slack = bottom_delta * (k - used)
                        if any(x > slack or -x > slack for x in new_vec[r:]):
                            continue
                    new_wit = wit[:j] + (v,) + wit[j + 1:]
                    new_gain = gain + v * cj
                else:
                    new_vec, new_wit, new_gain = vec, wit, gain
                key = (used, new_vec)
                cur = nxt.get(key)
                if cur is None or new_gain > cur[0] or (new_gain == cur[0] and new_wit < cur[1]):
                    nxt[key] = (new_gain, new_wit)
        states = _pareto(nxt)

    entries: dict[Vector, tuple[int, Vector]] = {}
    for (_units, vec), (gain, wit) in states.items():
        if any(vec[r:]):
            continue
        top = vec[:r]
        cur = entries.get(top)
        if cur is None or gain > cur[0] or (gain == cur[0] and wit < cur[1]):
            entries[top] = (gain, wit)
    return BrickGainTable(entries)
