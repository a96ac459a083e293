"""``nfold`` command line: ``solve`` an instance file or ``gen`` a random one."""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys

from .augment import DEFAULT_K_CAP
from .bounds import DEFAULT_BOUND_CONSTANT, BoundOverflowError, synthesize_bounds
from .generate import perturb_rhs, random_instance, with_infinite_bounds
from .io import InstanceFormatError, format_instance, parse_instance, report_to_dict
from .model import Status
from .oracle import OracleStatus, dp_solve, milp_solve
from .solver import SolverOptions, solve

EXIT_CODES = {
    Status.OPTIMAL: 0,
    Status.ERROR: 1,
    Status.INFEASIBLE: 2,
    Status.UNBOUNDED_SUSPECTED: 3,
}


def _oracle_check(inst, report, bound_constant: int) -> dict:
    """Cross-check on the (synthesized) box: enumeration, or HiGHS when the box is too large."""
    try:
        boxed, _ = synthesize_bounds(inst, bound_constant)
    except BoundOverflowError as exc:
        return {"status": "skipped", "message": str(exc)}
    res, method = dp_solve(boxed), "enumeration"
    if res.status is OracleStatus.BUDGET_EXCEEDED:
        res, method = milp_solve(boxed), "milp"
    out = {"method": method, "status": res.status.value, "objective": res.value}
    if res.status is OracleStatus.BUDGET_EXCEEDED:
        out["agrees"] = None
    elif report.status is Status.UNBOUNDED_SUSPECTED:
        # the box optimum is what the solver found before doubling the bound
        out["agrees"] = res.status is OracleStatus.OPTIMAL
    else:
        out["agrees"] = res.status.value == report.status.value and res.value == report.objective
    return out


def cmd_solve(args) -> int:
    try:
        inst = parse_instance(args.instance)
    except (OSError, InstanceFormatError) as exc:
        print(f"error: {args.instance}: {exc}", file=sys.stderr)
        return 1
    opts = SolverOptions(
        k=args.k,
        k_init=args.k_init,
        k_cap=args.k_cap,
        bound_constant=args.bound_constant,
        max_iterations=args.max_iters,
        rebuild=args.rebuild_mode,
    )
    report = solve(inst, opts)
    extra: dict = {"seed": args.seed}
    code = EXIT_CODES[report.status]
    if args.oracle_check:
        extra["oracle"] = _oracle_check(inst, report, args.bound_constant)
        if extra["oracle"].get("agrees") is False:
            print("error: solver and oracle disagree", file=sys.stderr)
            code = 1
    text = json.dumps(report_to_dict(report, extra), indent=2) + "\n"
    if args.report:
        with open(args.report, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if report.status is Status.ERROR:
        print(f"error: {report.message}", file=sys.stderr)
    return code


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    inst = random_instance(
        rng, args.n, args.r, args.s, args.t, delta=args.delta, bound=args.bound, c_range=args.c_range
    )
    if args.infinite:
        opened = with_infinite_bounds(rng, inst, fraction=args.infinite, c_range=args.c_range)
        if opened is None:
            print("error: no bounded objective found for the opened bounds; try another seed", file=sys.stderr)
            return 1
        inst = opened
    if args.perturb:
        inst = perturb_rhs(rng, inst, args.perturb)
    text = format_instance(inst)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfold", description="Exact n-fold integer programming by augmentation.")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve an instance file")
    p.add_argument("instance", help="instance document (JSON)")
    p.add_argument("--k", type=int, default=None, help="norm budget for the optimisation phase")
    p.add_argument("--k-init", type=int, default=None, help="norm budget for the feasibility phase")
    p.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP, help="cap on the formula default for k")
    p.add_argument("--bound-constant", type=int, default=DEFAULT_BOUND_CONSTANT, help="constant C of the artificial bound")
    p.add_argument("--max-iters", type=int, default=None, help="iteration cap per phase")
    p.add_argument("--rebuild-mode", action="store_true", help="rebuild every graph each iteration")
    p.add_argument("--oracle-check", action="store_true", help="cross-check with exhaustive search (small instances)")
    p.add_argument("--seed", type=int, default=None, help="recorded in the report; the solver itself is deterministic")
    p.add_argument("--report", default=None, help="write the report here instead of stdout")
    p.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--n", type=int, default=3)
    g.add_argument("--r", type=int, default=1)
    g.add_argument("--s", type=int, default=1)
    g.add_argument("--t", type=int, default=2)
    g.add_argument("--delta", type=int, default=2, help="largest absolute block entry")
    g.add_argument("--bound", type=int, default=3, help="bounds are drawn from [-bound, bound]")
    g.add_argument("--c-range", type=int, default=5)
    g.add_argument("--infinite", type=float, default=0.0, help="fraction of bounds to open (finite optimum kept)")
    g.add_argument("--perturb", type=int, default=0, help="shift b by up to this much (may become infeasible)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
