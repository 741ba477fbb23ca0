"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 a computation that did not reach
its target (MaxDepth, NoConvergence, a failed Fubini invariant, an
unattainable cover).

Domain specs: rect[:x0,y0,x1,y1], disk[:cx,cy,r], annulus[:cx,cy,rin,rout],
lshape, polygon:x1,y1,x2,y2,...
Field specs: one, poly, cont-generic, step-diag, cantor-indicator,
paper-example[:depth].
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

from .analysis import oscillation_map
from .errors import CoverNotAchievable, FubiniError
from .fields import MAX_CANTOR_DEPTH, field_from_spec, paper_example_field
from .geometry import (
    BoundingRect,
    build_eps_cover,
    classify_grid,
    domain_from_spec,
    jordan_measure_bounds,
    slice as slice_domain,
)
from .integrate import (
    Status,
    default_eps_seq,
    fubini_check,
    inner_improper_integral,
    integrate_double,
    rectangle_fubini,
    upper_lower_partial,
)

CLAIMED_LOWER = -2.0
CLAIMED_UPPER = -1.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _at_least_one(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return v


def _rect(text: str) -> BoundingRect:
    try:
        x0, y0, x1, y1 = (float(t) for t in text.split(","))
        return BoundingRect(x0, x1, y0, y1)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected x0,y0,x1,y1 with x0<x1, y0<y1: {text}") from exc


def _config(args) -> dict:
    out = {}
    for k, v in vars(args).items():
        if k == "handler":
            continue
        if isinstance(v, BoundingRect):
            v = [v.x_lo, v.y_lo, v.x_hi, v.y_hi]
        out[k] = v
    return out


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _dump_json(args, payload: dict) -> None:
    _emit(json.dumps({"config": _config(args), **payload}, indent=2))


def _dump_csv(header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _emit(buf.getvalue())


def _dump_table(pairs) -> None:
    pairs = list(pairs)
    width = max(len(k) for k, _ in pairs)
    _emit("\n".join(f"{k.ljust(width)}  {v!r}" if isinstance(v, float) else f"{k.ljust(width)}  {v}"
                    for k, v in pairs))


def _load(args):
    domain = domain_from_spec(args.domain)
    field = field_from_spec(args.field, rect=domain.bounds)
    return field, domain


def _eps_seq(args, bounds):
    return default_eps_seq(bounds, args.eps0, args.eps_terms)


def cmd_integrate(args) -> int:
    field, domain = _load(args)
    rep = integrate_double(field, domain, args.tol, max_level=args.max_level)
    if args.output == "json":
        _dump_json(args, rep.to_json())
    elif args.output == "csv":
        _dump_csv(["level", "value"], rep.trace)
    else:
        _dump_table([("value", rep.value), ("gap", rep.gap), ("status", rep.status.value),
                     ("level", rep.details["level"])])
    return 0 if rep.status is Status.CONVERGED else 2


def cmd_fubini_check(args) -> int:
    field, domain = _load(args)
    eps_seq = _eps_seq(args, domain.bounds)
    if args.mode == "rectangle":
        rect = args.rect or domain.bounds
        field = field_from_spec(args.field, rect=rect)
        rep = rectangle_fubini(field, rect, args.tol, eps_seq=eps_seq, max_level=args.max_level)
    else:
        rep = fubini_check(field, domain, args.tol, eps_seq=eps_seq, max_level=args.max_level)
    if args.output == "json":
        _dump_json(args, rep.to_json())
    elif args.output == "csv":
        _dump_csv(["x", "h"], rep.per_x_slice_trace)
    else:
        _dump_table([("double", rep.double_value), ("iterated", rep.iterated_value),
                     ("discrepancy", rep.discrepancy), ("predicted_bound", rep.predicted_bound),
                     ("double_gap", rep.double_gap), ("iterated_gap", rep.iterated_gap),
                     ("invariant_holds", "yes" if rep.invariant_holds else "no")])
    return 0 if rep.invariant_holds else 2


def cmd_counterexample(args) -> int:
    if not 1 <= args.depth <= MAX_CANTOR_DEPTH:
        raise UsageError(f"depth must be in 1..{MAX_CANTOR_DEPTH}, got {args.depth}")
    field, domain = paper_example_field(args.depth)
    rep = fubini_check(field, domain, args.tol, max_level=args.max_level)
    h1 = inner_improper_integral(field, domain, 1.0, tol=1e-6)
    lower, upper = upper_lower_partial(field, 1.0, 1.0, 2.0, args.level)
    outside = not (lower <= h1.value <= upper)
    rows = [
        ("depth", args.depth),
        ("level", args.level),
        ("measure_P", field.P.measure),
        ("double", rep.double_value),
        ("double_gap", rep.double_gap),
        ("iterated", rep.iterated_value),
        ("iterated_gap", rep.iterated_gap),
        ("h1", h1.value),
        ("h1_gap", h1.gap),
        ("envelope_lower", lower),
        ("envelope_upper", upper),
        ("claimed_lower", CLAIMED_LOWER),
        ("claimed_upper", CLAIMED_UPPER),
        ("h1_outside_envelope", "yes" if outside else "no"),
    ]
    if args.output == "json":
        _dump_json(args, dict(rows))
    elif args.output == "csv":
        _dump_csv(["quantity", "value"], rows)
    else:
        _dump_table(rows)
        _emit(f"h(1) outside envelope: {'yes' if outside else 'no'}")
    return 0


def cmd_measure(args) -> int:
    domain = domain_from_spec(args.domain)
    if args.dump_cells:
        _emit(classify_grid(domain, args.level).to_csv())
        return 0
    inner, outer = jordan_measure_bounds(domain, args.level)
    if args.output == "json":
        _dump_json(args, {"inner": inner, "outer": outer})
    elif args.output == "csv":
        _dump_csv(["inner", "outer"], [(inner, outer)])
    else:
        _dump_table([("inner", inner), ("outer", outer)])
    return 0


def cmd_oscillation(args) -> int:
    rect = args.rect or BoundingRect(0.0, 1.0, 0.0, 1.0)
    field = field_from_spec(args.field, rect=rect)
    omap = oscillation_map(field, rect, args.level, args.delta, seed=args.seed, extra_probes=args.probes)
    if args.output == "json":
        _dump_json(args, {"flagged_area": omap.flagged_area,
                          "cells": [[*c, o] for c, o in zip(omap.cells.tolist(), omap.osc.tolist())]})
    elif args.output == "csv":
        _emit(omap.to_csv())
    else:
        _dump_table([("flagged_cells", len(omap)), ("flagged_area", omap.flagged_area)])
    return 0


def cmd_slice(args) -> int:
    domain = domain_from_spec(args.domain)
    s = slice_domain(domain, build_eps_cover(domain, args.eps), args.x)
    if args.output == "json":
        _dump_json(args, {"intervals": [list(iv) for iv in s.intervals],
                          "total_length": s.total_length, "unresolved": s.unresolved})
    elif args.output == "csv":
        _dump_csv(["y_lo", "y_hi", "length"],
                  [(lo, hi, hi - lo) for lo, hi in s.intervals] + [("total", "", s.total_length)])
    else:
        _dump_table([(f"[{lo!r}, {hi!r}]", hi - lo) for lo, hi in s.intervals]
                    + [("total", s.total_length)])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jordan-fubini", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, output="json", field=True, domain="disk"):
        p.add_argument("--domain", default=domain, help="domain spec (default %(default)s)")
        if field:
            p.add_argument("--field", default="one", help="field spec (default %(default)s)")
        p.add_argument("--output", choices=("json", "csv", "table"), default=output)
        p.add_argument("--seed", type=int, default=0, help="seed for random probes (echoed)")

    def solver(p):
        p.add_argument("--tol", type=_positive, default=1e-3)
        p.add_argument("--max-level", type=_nonnegative, default=20)
        p.add_argument("--eps0", type=_positive, default=None,
                       help="first cover parameter (default: 0.1 x bounding area)")
        p.add_argument("--eps-terms", type=_at_least_one, default=12)

    p = sub.add_parser("integrate", help="double integral by Darboux sums")
    common(p)
    solver(p)
    p.set_defaults(handler=cmd_integrate)

    p = sub.add_parser("fubini-check", help="double against iterated integral")
    common(p)
    solver(p)
    p.add_argument("--mode", choices=("domain", "rectangle"), default="domain",
                   help="covers of the boundary (domain) or of the discontinuity set (rectangle)")
    p.add_argument("--rect", type=_rect, default=None, help="x0,y0,x1,y1 for rectangle mode")
    p.set_defaults(handler=cmd_fubini_check)

    p = sub.add_parser("counterexample", help="the L-shape example with a fat Cantor set")
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--level", type=_nonnegative, default=10, help="partition level for the envelope")
    p.add_argument("--tol", type=_positive, default=1e-3)
    p.add_argument("--max-level", type=_nonnegative, default=20)
    p.add_argument("--output", choices=("json", "csv", "table"), default="table")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_counterexample)

    p = sub.add_parser("measure", help="inner and outer Jordan measure")
    common(p, output="csv", field=False)
    p.add_argument("--level", type=_nonnegative, default=8)
    p.add_argument("--dump-cells", action="store_true", help="print the classified grid as CSV")
    p.set_defaults(handler=cmd_measure)

    p = sub.add_parser("oscillation", help="cells with oscillation >= delta")
    p.add_argument("--field", default="one")
    p.add_argument("--rect", type=_rect, default=None, help="x0,y0,x1,y1 (default unit square)")
    p.add_argument("--level", type=_nonnegative, default=6)
    p.add_argument("--delta", type=_positive, default=0.5)
    p.add_argument("--probes", type=_nonnegative, default=0, help="random probes added to the 9 fixed ones")
    p.add_argument("--output", choices=("json", "csv", "table"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=cmd_oscillation)

    p = sub.add_parser("slice", help="section of the interior minus an eps cover")
    common(p, output="csv", field=False)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--eps", type=_positive, default=1e-3)
    p.set_defaults(handler=cmd_slice)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (UsageError, KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"{parser.prog}: error: {msg}", file=sys.stderr)
        return 1
    except CoverNotAchievable as exc:
        print(f"{parser.prog}: {exc}", file=sys.stderr)
        return 2
    except FubiniError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
