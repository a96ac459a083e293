"""Exact n-fold instances and the linear algebra every other module builds on.

An n-fold matrix stacks ``n`` blocks side by side.  Block ``i`` contributes an
``r x t`` matrix ``A_i`` to the shared top rows and an ``s x t`` matrix ``B_i``
to its own private rows, so the whole matrix has ``r + n*s`` rows and ``n*t``
columns.  Variables come in bricks of ``t`` consecutive entries.

All values are Python integers.  Variable bounds may additionally be
``-math.inf`` (lower side only) or ``math.inf`` (upper side only); these are
floats and can therefore never be confused with a legitimately large finite
integer bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

Bound = Union[int, float]
Matrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]

NEG_INF = -math.inf
POS_INF = math.inf


class DimensionError(ValueError):
    """Raised when vectors or matrices have inconsistent shapes."""


class ArithmeticOverflow(ArithmeticError):
    """Raised when an exact result exceeds an explicitly requested bit limit."""


def is_finite(value: Bound) -> bool:
    return not (isinstance(value, float) and math.isinf(value))


def _matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    return tuple(tuple(int(v) for v in row) for row in rows)


def _bound(value) -> Bound:
    if isinstance(value, float) and math.isinf(value):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf"):
            return POS_INF
        if text == "-inf":
            return NEG_INF
        return int(text)
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"non-integer bound {value!r}")
        return int(value)
    return int(value)


@dataclass(frozen=True)
class NFoldInstance:
    """``max { c.x : A x = b, lower <= x <= upper, x integer }`` in n-fold form."""

    n: int
    r: int
    s: int
    t: int
    a_blocks: tuple[Matrix, ...]
    b_blocks: tuple[Matrix, ...]
    c: Vector
    b: Vector
    lower: tuple[Bound, ...]
    upper: tuple[Bound, ...]

    @classmethod
    def create(cls, a_blocks, b_blocks, c, b, lower, upper) -> "NFoldInstance":
        """Build an instance from nested lists, inferring the dimensions.

        Dimensions are taken from the first A- and B-block; ``validate``
        reports any later inconsistency.
        """
        a_blocks = tuple(_matrix(m) for m in a_blocks)
        b_blocks = tuple(_matrix(m) for m in b_blocks)
        if not a_blocks or not b_blocks:
            raise DimensionError("an n-fold instance needs at least one brick")
        n = len(a_blocks)
        r = len(a_blocks[0])
        s = len(b_blocks[0])
        t = len(a_blocks[0][0]) if r else (len(b_blocks[0][0]) if s else 0)
        return cls(
            n=n,
            r=r,
            s=s,
            t=t,
            a_blocks=a_blocks,
            b_blocks=b_blocks,
            c=tuple(int(v) for v in c),
            b=tuple(int(v) for v in b),
            lower=tuple(_bound(v) for v in lower),
            upper=tuple(_bound(v) for v in upper),
        )

    @property
    def num_vars(self) -> int:
        return self.n * self.t

    @property
    def num_rows(self) -> int:
        return self.r + self.n * self.s

    def brick_slice(self, i: int) -> slice:
        return slice(i * self.t, (i + 1) * self.t)

    def delta(self) -> int:
        """Largest absolute matrix entry; an all-zero matrix reports 1."""
        best = 0
        for block in self.a_blocks + self.b_blocks:
            for row in block:
                for v in row:
                    best = max(best, abs(v))
        return max(best, 1)

    def gamma(self) -> int:
        """``max_j (upper_j - lower_j)``; requires finite bounds."""
        if not self.has_finite_bounds():
            raise ValueError("gamma is undefined for infinite bounds")
        return max((u - l for l, u in zip(self.lower, self.upper)), default=0)

    def zeta(self) -> int:
        """Largest absolute value among the finite bounds (0 if there are none)."""
        vals = [abs(v) for v in self.lower + self.upper if is_finite(v)]
        return int(max(vals, default=0))

    def encoding_length(self) -> int:
        """Bit length of the largest absolute integer in the input."""
        values = [abs(v) for v in self.c + self.b]
        values += [abs(v) for v in self.lower + self.upper if is_finite(v)]
        for block in self.a_blocks + self.b_blocks:
            for row in block:
                values.extend(abs(v) for v in row)
        return max(max(values, default=0).bit_length(), 1)

    def has_finite_bounds(self) -> bool:
        return all(is_finite(v) for v in self.lower + self.upper)

    def column(self, j: int) -> Vector:
        """Column ``j`` of the full matrix as a dense tuple (used by oracles)."""
        brick, local = divmod(j, self.t)
        col = [0] * self.num_rows
        for row in range(self.r):
            col[row] = self.a_blocks[brick][row][local]
        base = self.r + brick * self.s
        for row in range(self.s):
            col[base + row] = self.b_blocks[brick][row][local]
        return tuple(col)

    def dense_matrix(self) -> list[list[int]]:
        rows = [[0] * self.num_vars for _ in range(self.num_rows)]
        for j in range(self.num_vars):
            for i, v in enumerate(self.column(j)):
                rows[i][j] = v
        return rows

    def replace(self, **changes) -> "NFoldInstance":
        data = {f: getattr(self, f) for f in self.__dataclass_fields__}
        data.update(changes)
        return NFoldInstance(**data)


@dataclass(frozen=True)
class Solution:
    x: Vector

    def brick(self, inst: NFoldInstance, i: int) -> Vector:
        return self.x[inst.brick_slice(i)]


class Status(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED_SUSPECTED = "unbounded_suspected"
    ERROR = "error"


@dataclass
class SolveReport:
    status: Status
    objective: int | None = None
    x: Vector | None = None
    iterations: int = 0
    phase1_iterations: int = 0
    artificial_bound_tight: bool = False
    wall_time: float = 0.0
    message: str = ""
    details: dict = field(default_factory=dict)


def _check_len(x: Sequence[int], expected: int, what: str) -> None:
    if len(x) != expected:
        raise DimensionError(f"{what} has length {len(x)}, expected {expected}")


def _check_bits(values: Sequence[int], bit_limit: int | None) -> None:
    if bit_limit is None:
        return
    for v in values:
        if abs(v).bit_length() >= bit_limit:
            raise ArithmeticOverflow(f"value {v} exceeds {bit_limit}-bit range")


def apply_matrix(inst: NFoldInstance, x: Sequence[int], bit_limit: int | None = None) -> Vector:
    """Exact product of the n-fold matrix with ``x``.

    Python integers never wrap; ``bit_limit`` turns the automatic widening
    off and raises :class:`ArithmeticOverflow` instead.
    """
    _check_len(x, inst.num_vars, "x")
    top = [0] * inst.r
    out_bottom: list[int] = []
    t = inst.t
    for i in range(inst.n):
        xi = x[i * t:(i + 1) * t]
        for row_idx, row in enumerate(inst.a_blocks[i]):
            top[row_idx] += sum(a * v for a, v in zip(row, xi))
        for row in inst.b_blocks[i]:
            out_bottom.append(sum(a * v for a, v in zip(row, xi)))
    result = tuple(top) + tuple(out_bottom)
    _check_bits(result, bit_limit)
    return result


def residual(inst: NFoldInstance, x: Sequence[int], bit_limit: int | None = None) -> Vector:
    ax = apply_matrix(inst, x, bit_limit)
    return tuple(bi - v for bi, v in zip(inst.b, ax))


def objective(inst: NFoldInstance, x: Sequence[int]) -> int:
    _check_len(x, inst.num_vars, "x")
    return sum(ci * xi for ci, xi in zip(inst.c, x))


def within_bounds(inst: NFoldInstance, x: Sequence[int]) -> bool:
    return all(l <= v <= u for l, v, u in zip(inst.lower, x, inst.upper))


def is_feasible(inst: NFoldInstance, x: Sequence[int]) -> bool:
    return within_bounds(inst, x) and not any(residual(inst, x))


def validate(inst: NFoldInstance) -> list[str]:
    """Return every violated structural invariant; an empty list means ok."""
    problems: list[str] = []
    for name in ("n", "r", "s", "t"):
        if getattr(inst, name) < 1:
            problems.append(f"{name} must be >= 1, got {getattr(inst, name)}")
    if len(inst.a_blocks) != inst.n:
        problems.append(f"expected {inst.n} A-blocks, got {len(inst.a_blocks)}")
    if len(inst.b_blocks) != inst.n:
        problems.append(f"expected {inst.n} B-blocks, got {len(inst.b_blocks)}")
    for kind, blocks, rows in (("A", inst.a_blocks, inst.r), ("B", inst.b_blocks, inst.s)):
        for i, block in enumerate(blocks):
            if len(block) != rows:
                problems.append(f"{kind}-block {i} has {len(block)} rows, expected {rows}")
            for j, row in enumerate(block):
                if len(row) != inst.t:
                    problems.append(
                        f"{kind}-block {i} row {j} has {len(row)} columns, expected {inst.t}"
                    )
    nt = inst.n * inst.t
    for name, vec, expected in (
        ("c", inst.c, nt),
        ("b", inst.b, inst.r + inst.n * inst.s),
        ("lower", inst.lower, nt),
        ("upper", inst.upper, nt),
    ):
        if len(vec) != expected:
            problems.append(f"{name} has length {len(vec)}, expected {expected}")
    for idx, (lo, up) in enumerate(zip(inst.lower, inst.upper)):
        if lo == POS_INF:
            problems.append(f"lower[{idx}] is +inf")
        if up == NEG_INF:
            problems.append(f"upper[{idx}] is -inf")
        if lo > up:
            problems.append(f"lower[{idx}]={lo} > upper[{idx}]={up}")
    return problems
