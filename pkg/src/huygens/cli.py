"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 degenerate input (identically vanishing Wronskian).
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from fractions import Fraction
from itertools import product

import gmpy2
import numpy as np

from . import io as hio
from .errors import DegenerateWronskianError, HuygensError, InvalidKDataError
from .hadamard import ba_eval, hadamard_table, heat_kernel_eval
from .scalars import DEFAULT_FLOAT_BITS, Mode
from .spectral import DEFAULT_DEN_GUARD, potential_eval
from .verify import resolve_suites, run_suite
from .wronskian import KData, full_wronskian

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_DEGENERATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    return "" if v is None else format(float(v), ".17g")


def _num(v):
    return None if v is None else float(format(float(v), ".17g"))


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--k expects comma-separated integers, got {text!r}") from None


def _parse_point(text) -> tuple[float, float]:
    if isinstance(text, (list, tuple)):
        vals = list(text)
    else:
        vals = [t for t in str(text).split(",") if t.strip()]
    if len(vals) != 2:
        raise UsageError(f"a point needs two coordinates, got {text!r}")
    try:
        return float(Fraction(str(vals[0]).strip())), float(Fraction(str(vals[1]).strip()))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad point {text!r}") from None


def parse_grid(text: str):
    """``x0:x1:n,y0:y1:n`` into two coordinate arrays."""
    try:
        axes = []
        for part in text.split(","):
            a, b, n = part.split(":")
            a, b, n = float(Fraction(a)), float(Fraction(b)), int(n)
            if n < 1 or (n > 1 and not b > a):
                raise ValueError
            axes.append(np.linspace(a, b, n))
        xs, ys = axes
    except ValueError:
        raise UsageError(f"--grid expects x0:x1:n,y0:y1:n with x0 < x1 and n >= 1, got {text!r}") from None
    return xs, ys


def _load_config(args) -> tuple[KData, dict]:
    extra = {}
    mode = Mode.parse(args.mode) if args.mode else None
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(obj, dict):
            raise UsageError("config must be a JSON object")
        extra = obj
        data = hio.kdata_from_dict(obj, mode)
        return data, extra
    if args.k is None:
        raise UsageError("give --k or --config")
    k = _parse_ints(args.k)
    mode = mode or Mode.parse("exact")
    cos, sin = args.phase_cos or [], args.phase_sin or []
    if len(cos) != len(sin):
        raise UsageError("--phase-cos and --phase-sin must be given the same number of times")
    if cos:
        if len(cos) != len(k):
            raise UsageError(f"{len(k)} integers but {len(cos)} phases")
        phases = [{"cos": c, "sin": s} for c, s in zip(cos, sin)]
        return hio.kdata_from_dict({"k": k, "phases": phases}, mode), extra
    return KData.trivial(k, mode), extra


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _meta(data: KData) -> dict:
    return {"schema": hio.SCHEMA, **hio.kdata_to_dict(data), "k_max": data.k_max}


# -- commands -------------------------------------------------------------------


def cmd_potential(args, data: KData, extra: dict) -> int:
    full_wronskian(data)
    xs, ys = parse_grid(args.grid or extra.get("grid", "-2:2:64,-2:2:64"))
    guard = args.tol if args.tol is not None else DEFAULT_DEN_GUARD
    # near the singular lines numerator and denominator cancel to high order,
    # so cells are evaluated in extended precision and rounded afterwards
    bits = data.mode.precision or DEFAULT_FLOAT_BITS
    cells = []
    with gmpy2.context(precision=bits):
        for x2 in ys:
            for x1 in xs:
                try:
                    pt = (gmpy2.mpfr(float(x1)), gmpy2.mpfr(float(x2)))
                    v, singular = float(potential_eval(data, pt, den_guard=guard)), False
                except HuygensError:
                    v, singular = None, True
                cells.append((float(x1), float(x2), v, singular))
    if args.format == "csv":
        rows = [(_fmt(a), _fmt(b), _fmt(v), str(s).lower()) for a, b, v, s in cells]
        _emit(args, _csv(["x1", "x2", "V", "singular"], rows))
    else:
        body = _meta(data) | {"kind": "potential", "grid": args.grid or extra.get("grid", "-2:2:64,-2:2:64"),
                              "cells": [{"x1": _num(a), "x2": _num(b), "V": _num(v), "singular": s}
                                        for a, b, v, s in cells]}
        _emit(args, hio.dumps(body))
    return EXIT_OK


def cmd_coeffs(args, data: KData, extra: dict) -> int:
    table = hadamard_table(data)
    obj = hio.table_to_dict(table)
    if args.format == "csv":
        rows = [(c["nu"], c["sigma"], c["numerator"], c["denominator"], c["scaling"]) for c in obj["coefficients"]]
        _emit(args, _csv(["nu", "sigma", "numerator", "denominator", "scaling"], rows))
    else:
        _emit(args, hio.dumps(obj))
    return EXIT_OK


def _points(values, key, extra):
    raw = values if values else extra.get(key)
    if not raw:
        raise UsageError(f"give at least one --{key.replace('_', '-')}")
    return [_parse_point(v) for v in raw]


def _rows(args, data, extra, with_time: bool):
    table = hadamard_table(data)
    xs = _points(args.x, "x", extra)
    xis = _points(args.xi, "xi", extra)
    guard = args.tol if args.tol is not None else DEFAULT_DEN_GUARD
    if with_time:
        ts = args.t if args.t else extra.get("t")
        if not ts:
            raise UsageError("give at least one --t")
        ts = [float(Fraction(str(t))) for t in ts]
    rows = []
    for combo in product(xs, xis, ts) if with_time else product(xs, xis):
        x, xi = combo[0], combo[1]
        try:
            if with_time:
                val = heat_kernel_eval(table, x, xi, combo[2], den_guard=guard)
            else:
                val = ba_eval(table, x, xi, den_guard=guard)
            err = ""
        except HuygensError as exc:
            val, err = None, f"{type(exc).__name__}: {exc}"
        rows.append((*x, *xi, *combo[2:], None if val is None else float(val), err))
    return rows


def _value_output(args, data, rows, header, kind):
    if args.format == "csv":
        out = [tuple(_fmt(v) for v in r[:-1]) + (r[-1],) for r in rows]
        _emit(args, _csv(header, out))
    else:
        recs = [dict(zip(header[:-1], map(_num, r[:-1]))) | {"error": r[-1] or None} for r in rows]
        _emit(args, hio.dumps(_meta(data) | {"kind": kind, "rows": recs}))


def cmd_kernel(args, data: KData, extra: dict) -> int:
    rows = _rows(args, data, extra, with_time=True)
    _value_output(args, data, rows, ["x1", "x2", "xi1", "xi2", "t", "phi", "error"], "kernel")
    return EXIT_OK


def cmd_ba(args, data: KData, extra: dict) -> int:
    rows = _rows(args, data, extra, with_time=False)
    _value_output(args, data, rows, ["x1", "x2", "xi1", "xi2", "psi_ba", "error"], "ba")
    return EXIT_OK


def cmd_verify(args, data: KData, extra: dict) -> int:
    raw = args.suite or extra.get("suite") or ["all"]
    if isinstance(raw, str):
        raw = [raw]
    names = [n.strip() for item in raw for n in item.split(",") if n.strip()]
    try:
        names = resolve_suites(names)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    seed = args.seed if args.seed is not None else int(extra.get("seed", 0))
    reports = run_suite(data, names, seed=seed)
    _emit(args, "".join(r.to_json() + "\n" for r in reports))
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"potential": cmd_potential, "coeffs": cmd_coeffs, "kernel": cmd_kernel, "ba": cmd_ba,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", help="comma-separated integers, e.g. 0,1,3,4")
    common.add_argument("--phase-cos", action="append", help="cos of a phase (one per integer, repeatable)")
    common.add_argument("--phase-sin", action="append", help="sin of a phase (one per integer, repeatable)")
    common.add_argument("--config", help="JSON file with k, phases, mode and command options")
    common.add_argument("--mode", help="exact (default) or float:<bits>")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=float, help="singularity guard for evaluations")
    common.add_argument("--seed", type=int, help="seed for randomised sampling")

    parser = argparse.ArgumentParser(prog="huygens", description="Huygens potentials and exact heat kernels")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("potential", parents=[common], help="evaluate the potential on a grid")
    p.add_argument("--grid", help="x0:x1:n,y0:y1:n (default -2:2:64,-2:2:64)")
    sub.add_parser("coeffs", parents=[common], help="dump the coefficient table")
    for name, helptext in (("kernel", "evaluate the heat kernel"), ("ba", "evaluate the Baker-Akhiezer function")):
        q = sub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("--x", action="append", help="point x1,x2 (repeatable)")
        q.add_argument("--xi", action="append", help="point xi1,xi2 (repeatable)")
        if name == "kernel":
            q.add_argument("--t", action="append", help="time (repeatable)")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", action="append",
                   help="eigen, unity, darboux, cramer, transport, vanishing, goursat, series, "
                        "transport-oracle, heat, ba-probe or all (repeatable or comma-separated)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        data, extra = _load_config(args)
        return COMMANDS[args.command](args, data, extra)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateWronskianError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidKDataError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
