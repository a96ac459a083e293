"""End-to-end pipeline: validate, bound, find a feasible point, augment."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass

from .augment import DEFAULT_ITERATION_CONSTANT, DEFAULT_K_CAP, AugmentLoop, ConvergenceError, default_k, iteration_cap
from .bounds import DEFAULT_BOUND_CONSTANT, BoundOverflowError, synthesize_bounds, tightness_flag
from .feasibility import solve_phase_one
from .model import NFoldInstance, SolveReport, Status, is_feasible, objective, validate
from .splitter import build_fks_family

log = logging.getLogger(__name__)


@dataclass
class SolverOptions:
    k: int | None = None
    k_init: int | None = None
    k_cap: int = DEFAULT_K_CAP
    bound_constant: int = DEFAULT_BOUND_CONSTANT
    iteration_constant: int = DEFAULT_ITERATION_CONSTANT
    max_iterations: int | None = None
    rebuild: bool = False
    check_unbounded: bool = True
    # phase one doubles its k while stuck below 0, up to this multiple of k_cap
    k_init_growth: int = 4


def _augment(inst: NFoldInstance, x0, k: int, opts: SolverOptions):
    loop = AugmentLoop(inst, x0, k, build_fks_family(inst.n, max(k, 1)), rebuild=opts.rebuild)
    cap = opts.max_iterations
    if cap is None:
        cap = iteration_cap(inst, opts.iteration_constant)
    return loop.run(cap)


def _solve_bounded(inst: NFoldInstance, opts: SolverOptions, details: dict) -> SolveReport:
    k = opts.k if opts.k is not None else default_k(inst, opts.k_cap)
    phase1 = solve_phase_one(
        inst,
        k_init=opts.k_init,
        k_cap=opts.k_cap,
        growth=opts.k_init_growth,
        max_iterations=opts.max_iterations,
        iteration_constant=opts.iteration_constant,
        rebuild=opts.rebuild,
    )
    details.update(
        k=k,
        k_init=phase1.k_used,
        gamma=inst.gamma(),
        gamma_init=phase1.gamma,
        family_size_init=phase1.family_size,
        phase1_iterations=phase1.iterations,
        phase1_gains=phase1.gains,
    )
    x0 = phase1.x
    if x0 is None:
        return SolveReport(Status.INFEASIBLE, phase1_iterations=phase1.iterations, details=details)
    if not is_feasible(inst, x0):
        raise AssertionError("phase one returned an infeasible point")
    phase2 = _augment(inst, x0, k, opts)
    details.update(
        iterations=phase2.iterations, gains=phase2.gains, family_size=phase2.family_size, num_graphs=phase2.num_graphs
    )
    if not is_feasible(inst, phase2.x):
        raise AssertionError("augmentation returned an infeasible point")
    return SolveReport(
        Status.OPTIMAL,
        objective=phase2.objective,
        x=phase2.x,
        iterations=phase2.iterations,
        phase1_iterations=phase1.iterations,
        details=details,
    )


def solve(inst: NFoldInstance, options: SolverOptions | None = None) -> SolveReport:
    """Solve ``inst`` exactly (given a sufficient norm budget ``k``)."""
    opts = options or SolverOptions()
    start = time.perf_counter()
    problems = validate(inst)
    if problems:
        return SolveReport(Status.ERROR, message="; ".join(problems), wall_time=time.perf_counter() - start)
    details: dict = {
        "delta": inst.delta(),
        "zeta": inst.zeta(),
        "encoding_length": inst.encoding_length(),
    }
    try:
        bounded, bound_report = synthesize_bounds(inst, opts.bound_constant)
        details["synthesized_bound"] = bound_report.synthesized_bound if bound_report.replaced else None
        details["replaced"] = list(bound_report.replaced)
        report = _solve_bounded(bounded, opts, details)
        if report.status is Status.OPTIMAL and bound_report.replaced:
            report.artificial_bound_tight = tightness_flag(bound_report, report.x)
            if report.artificial_bound_tight and opts.check_unbounded:
                wider, wider_report = synthesize_bounds(inst, 2 * opts.bound_constant)
                again = _solve_bounded(wider, opts, {})
                details["doubled_bound_objective"] = again.objective
                if again.status is Status.OPTIMAL and again.objective > report.objective:
                    report.status = Status.UNBOUNDED_SUSPECTED
                    report.message = (
                        f"objective grows from {report.objective} to {again.objective} "
                        f"when the artificial bound doubles to {wider_report.synthesized_bound}"
                    )
    except ConvergenceError as exc:
        report = SolveReport(Status.ERROR, x=exc.x, iterations=exc.iterations, message=str(exc), details=details)
    except BoundOverflowError as exc:
        report = SolveReport(Status.ERROR, message=str(exc), details=details)
    report.wall_time = time.perf_counter() - start
    if report.status is Status.OPTIMAL and report.objective is None and report.x is not None:
        report.objective = objective(inst, report.x)
    return report
