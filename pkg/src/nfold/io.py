"""Instance and report documents.

Both are JSON.  An instance document looks like::

    {
      "n": 2, "r": 1, "s": 1, "t": 2,
      "a_blocks": [[[1, 1]], [[1, 1]]],
      "b_blocks": [[[1, -1]], [[1, -1]]],
      "c": [1, 0, 0, 1],
      "b": [4, 0, 0],
      "lower": [0, 0, 0, "-inf"],
      "upper": [3, 3, 3, "inf"]
    }

Block ``i`` of ``a_blocks`` is the ``r x t`` matrix ``A_i`` and block ``i`` of
``b_blocks`` the ``s x t`` matrix ``B_i``.  ``b`` lists the ``r`` top rows
first, then ``s`` rows per brick.  Infinite bounds are the strings ``"-inf"``
and ``"inf"``.  Parsing is strict: every error names the offending field
(``b``, ``a_blocks[1][0][2]``, ...) or, for broken JSON, the line and column.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .model import NEG_INF, POS_INF, NFoldInstance, SolveReport, validate

FIELDS = ("n", "r", "s", "t", "a_blocks", "b_blocks", "c", "b", "lower", "upper")


class InstanceFormatError(ValueError):
    """A located problem in an instance document."""

    def __init__(self, where: str, problem: str):
        super().__init__(f"{where}: {problem}")
        self.where = where
        self.problem = problem


def _int(value: Any, where: str) -> int:
    # bool is an int subclass; reject it along with floats such as 1.0
    if isinstance(value, bool) or not isinstance(value, int):
        raise InstanceFormatError(where, f"expected an integer, got {value!r}")
    return value


def _bound(value: Any, where: str, side: str):
    if isinstance(value, str):
        if side == "lower" and value == "-inf":
            return NEG_INF
        if side == "upper" and value == "inf":
            return POS_INF
        raise InstanceFormatError(where, f"only {'-inf' if side == 'lower' else 'inf'!r} is allowed here, got {value!r}")
    return _int(value, where)


def _int_list(value: Any, where: str, length: int) -> list[int]:
    if not isinstance(value, list):
        raise InstanceFormatError(where, "expected a list")
    if len(value) != length:
        raise InstanceFormatError(where, f"expected length {length}, got {len(value)}")
    return [_int(v, f"{where}[{i}]") for i, v in enumerate(value)]


def _blocks(value: Any, where: str, n: int, rows: int, t: int) -> list[list[list[int]]]:
    if not isinstance(value, list):
        raise InstanceFormatError(where, "expected a list of blocks")
    if len(value) != n:
        raise InstanceFormatError(where, f"expected {n} blocks, got {len(value)}")
    out = []
    for i, blk in enumerate(value):
        if not isinstance(blk, list) or len(blk) != rows:
            got = len(blk) if isinstance(blk, list) else type(blk).__name__
            raise InstanceFormatError(f"{where}[{i}]", f"expected {rows} rows, got {got}")
        out.append([_int_list(row, f"{where}[{i}][{q}]", t) for q, row in enumerate(blk)])
    return out


def instance_from_dict(doc: Any) -> NFoldInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("<document>", "expected an object")
    missing = [f for f in FIELDS if f not in doc]
    if missing:
        raise InstanceFormatError(missing[0], "missing field")
    unknown = sorted(set(doc) - set(FIELDS))
    if unknown:
        raise InstanceFormatError(unknown[0], "unknown field")
    n, r, s, t = (_int(doc[f], f) for f in ("n", "r", "s", "t"))
    for name, val in (("n", n), ("r", r), ("s", s), ("t", t)):
        if val < 1:
            raise InstanceFormatError(name, f"must be >= 1, got {val}")
    a_blocks = _blocks(doc["a_blocks"], "a_blocks", n, r, t)
    b_blocks = _blocks(doc["b_blocks"], "b_blocks", n, s, t)
    c = _int_list(doc["c"], "c", n * t)
    b = _int_list(doc["b"], "b", r + n * s)
    bounds = {}
    for side in ("lower", "upper"):
        raw = doc[side]
        if not isinstance(raw, list) or len(raw) != n * t:
            got = len(raw) if isinstance(raw, list) else type(raw).__name__
            raise InstanceFormatError(side, f"expected a list of length {n * t}, got {got}")
        bounds[side] = [_bound(v, f"{side}[{j}]", side) for j, v in enumerate(raw)]
    for j, (lo, up) in enumerate(zip(bounds["lower"], bounds["upper"])):
        if lo > up:
            raise InstanceFormatError(f"lower[{j}]", f"{lo} exceeds upper[{j}]={up}")
    inst = NFoldInstance(
        n=n,
        r=r,
        s=s,
        t=t,
        a_blocks=tuple(tuple(tuple(row) for row in blk) for blk in a_blocks),
        b_blocks=tuple(tuple(tuple(row) for row in blk) for blk in b_blocks),
        c=tuple(c),
        b=tuple(b),
        lower=tuple(bounds["lower"]),
        upper=tuple(bounds["upper"]),
    )
    problems = validate(inst)
    if problems:
        raise InstanceFormatError("<instance>", "; ".join(problems))
    return inst


def parse_instance_text(text: str) -> NFoldInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    return instance_from_dict(doc)


def parse_instance(path: str | Path) -> NFoldInstance:
    return parse_instance_text(Path(path).read_text())


def _bound_out(v):
    if v == NEG_INF:
        return "-inf"
    if v == POS_INF:
        return "inf"
    return int(v)


def instance_to_dict(inst: NFoldInstance) -> dict:
    return {
        "n": inst.n,
        "r": inst.r,
        "s": inst.s,
        "t": inst.t,
        "a_blocks": [[list(row) for row in blk] for blk in inst.a_blocks],
        "b_blocks": [[list(row) for row in blk] for blk in inst.b_blocks],
        "c": list(inst.c),
        "b": list(inst.b),
        "lower": [_bound_out(v) for v in inst.lower],
        "upper": [_bound_out(v) for v in inst.upper],
    }


def _compact(value: Any, indent: int = 0) -> str:
    """JSON with one top-level key per line and innermost rows on one line."""
    if isinstance(value, dict):
        pad = "  " * (indent + 1)
        items = [f"{pad}{json.dumps(k)}: {_compact(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    return json.dumps(value, separators=(", ", ": "))


def format_instance(inst: NFoldInstance) -> str:
    return _compact(instance_to_dict(inst)) + "\n"


def write_instance(inst: NFoldInstance, path: str | Path) -> None:
    Path(path).write_text(format_instance(inst))


REPORT_KEYS = (
    "status",
    "objective",
    "x",
    "iterations",
    "phase1_iterations",
    "artificial_bound_tight",
    "wall_time",
    "message",
    "delta",
    "gamma",
    "zeta",
    "encoding_length",
    "k",
    "k_init",
    "family_size",
    "family_size_init",
    "synthesized_bound",
    "gains",
    "phase1_gains",
)


def report_to_dict(report: SolveReport, extra: dict | None = None) -> dict:
    """Stable report schema; keys missing for a status are ``null``."""
    details = report.details or {}
    base = {
        "status": report.status.value,
        "objective": report.objective,
        "x": list(report.x) if report.x is not None else None,
        "iterations": report.iterations,
        "phase1_iterations": report.phase1_iterations,
        "artificial_bound_tight": report.artificial_bound_tight,
        "wall_time": round(report.wall_time, 6),
        "message": report.message,
    }
    out = {key: base.get(key, details.get(key)) for key in REPORT_KEYS}
    if extra:
        out.update(extra)
    return out


def write_report(report: SolveReport, path: str | Path, extra: dict | None = None) -> None:
    Path(path).write_text(json.dumps(report_to_dict(report, extra), indent=2) + "\n")
