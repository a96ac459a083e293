"""Replace infinite variable bounds by a finite box that keeps an optimum.

If an n-fold has a finite optimum, some optimal point has l1-norm at most
``(rs Delta)^O(rs) * (|b|_1 + n t zeta)`` where ``zeta`` is the largest finite
bound in absolute value.  The hidden constant is fixed here as

    M = C * (2 r s Delta + 2)^(r s + 1) * (|b|_1 + n t zeta + 1)

and every infinite bound becomes ``-M`` or ``+M``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import NEG_INF, POS_INF, NFoldInstance

DEFAULT_BOUND_CONSTANT = 4


class BoundOverflowError(ValueError):
    """The synthesized bound is too large to be useful; set bounds by hand."""


@dataclass(frozen=True)
class BoundReport:
    zeta: int
    synthesized_bound: int
    replaced_lower: tuple[int, ...] = ()
    replaced_upper: tuple[int, ...] = ()
    constant: int = DEFAULT_BOUND_CONSTANT

    @property
    def replaced(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.replaced_lower) | set(self.replaced_upper)))


def synthesized_bound(inst: NFoldInstance, constant: int = DEFAULT_BOUND_CONSTANT) -> int:
    rs = inst.r * inst.s
    norm_b = sum(abs(v) for v in inst.b)
    return constant * (2 * rs * inst.delta() + 2) ** (rs + 1) * (norm_b + inst.num_vars * inst.zeta() + 1)


def synthesize_bounds(
    inst: NFoldInstance,
    constant: int = DEFAULT_BOUND_CONSTANT,
    max_bits: int | None = 256,
) -> tuple[NFoldInstance, BoundReport]:
    if constant < 1:
        raise ValueError("the bound constant must be >= 1")
    big_m = synthesized_bound(inst, constant)
    if max_bits is not None and big_m.bit_length() > max_bits:
        raise BoundOverflowError(
            f"synthesized bound needs {big_m.bit_length()} bits; supply finite bounds manually"
        )
    lower = list(inst.lower)
    upper = list(inst.upper)
    rep_lo = [j for j, v in enumerate(lower) if v == NEG_INF]
    rep_up = [j for j, v in enumerate(upper) if v == POS_INF]
    for j in rep_lo:
        lower[j] = -big_m
    for j in rep_up:
        upper[j] = big_m
    report = BoundReport(inst.zeta(), big_m, tuple(rep_lo), tuple(rep_up), constant)
    if not rep_lo and not rep_up:
        return inst, report
    return inst.replace(lower=tuple(lower), upper=tuple(upper)), report


def tightness_flag(report: BoundReport, x: Sequence[int]) -> bool:
    """True iff ``x`` sits on one of the artificial bounds."""
    m = report.synthesized_bound
    return any(x[j] == -m for j in report.replaced_lower) or any(x[j] == m for j in report.replaced_upper)
