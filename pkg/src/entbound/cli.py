"""``entbound`` command line: eval, scan, segment, regions, binegative, check."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .areep import areep
from .binegativity import search_binegative
from .config import get_config, using
from .exceptions import EntboundError
from .measures import additivity_check, negativity_closed, reep
from .oo import OOState, key_points
from .rains import rains_closed

MEASURES = ("areep", "reep", "rains", "negativity")


@dataclass(frozen=True)
class EvalRecord:
    d: int
    f: float
    fhat: float
    region: str
    subregion: str | None
    reep: float
    rains: float
    areep: float
    negativity: float
    additivity: str
    log_base: str


def evaluate(d, f, fhat) -> EvalRecord:
    rho = OOState(d, f, fhat)
    r = reep(rho)
    return EvalRecord(
        d=rho.d,
        f=rho.f,
        fhat=rho.fhat,
        region=r.region.tag,
        subregion=r.region.subtag,
        reep=r.value,
        rains=rains_closed(rho).value,
        areep=areep(rho).value,
        negativity=negativity_closed(rho),
        additivity=additivity_check(rho).level,
        log_base=get_config().base_label,
    )


def measure_value(rho, measure):
    if measure == "negativity":
        return negativity_closed(rho)
    return {"areep": areep, "reep": reep, "rains": rains_closed}[measure](rho).value


def _header(d):
    return f"# entbound v1, d={d}, base={get_config().base_label}"


def _fmt(x):
    return format(float(x), ".12g")


def scan_row(d, resolution, i, measure, log_base):
    """Row i of the scan grid. Steps in fhat are d/(n-1), so the edge is hit exactly."""
    n = resolution
    f = -1 + 2 * i / (n - 1)
    with using(log_base=log_base):
        return [(f, d * j / (n - 1), measure_value(OOState(d, f, d * j / (n - 1)), measure)) for j in range(i + 1)]


def scan(d, resolution, measure="areep", workers=1):
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    base = get_config().log_base
    rows = range(resolution)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = pool.map(scan_row, *zip(*[(d, resolution, i, measure, base) for i in rows]))
            return [pt for chunk in chunks for pt in chunk]
    return [pt for i in rows for pt in scan_row(d, resolution, i, measure, base)]


def segment_abscissae(d, npoints):
    """Uniform samples of f on AB, plus the f coordinates of Y and X."""
    kp = key_points(d)
    fs = np.linspace(-1.0, kp.B[0], npoints)
    fs = np.union1d(fs, [kp.Y[0], kp.X[0]])
    return fs


def segment_piece(d, f):
    kp = key_points(d)
    if f <= kp.Y[0]:
        return "AY"
    if f <= kp.X[0]:
        return "YX"
    return "XB"


def segment(d, npoints):
    out = []
    for f in segment_abscissae(d, npoints):
        fhat = d * (1 + f) / 2
        rho = OOState(d, f, fhat)
        out.append((d, float(f), fhat, rains_closed(rho).value, segment_piece(d, f)))
    return out


def _line(p, q):
    """Coefficients (a, b, c) of a f + b fhat + c = 0 through two points."""
    (x1, y1), (x2, y2) = p, q
    a, b = y2 - y1, x1 - x2
    c = -(a * x1 + b * y1)
    scale = max(abs(a), abs(b))
    return [a / scale, b / scale, c / scale]


def regions(d):
    kp = key_points(d)
    pts = kp._asdict()
    top = (1.0, float(d))
    lines = {
        "BC": [d - 1.0, -1.0, 3 - 4 / d],
        "CD": [1.0, 0.0, 2 / d],
        "CY": [2.0, -(d + 2.0), float(d)],
        "AB_edge": [d / 2, -1.0, d / 2],
        "bottom_edge": [0.0, 1.0, 0.0],
        "right_edge": [1.0, 0.0, -1.0],
        "ppt_f0": [1.0, 0.0, 0.0],
        "ppt_fhat1": [0.0, 1.0, -1.0],
    }
    polygons = {
        "triangle": [kp.A, (1.0, 0.0), top],
        "ppt_square": [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
        "non_additive": [kp.A, kp.D, kp.C, kp.B],
        "AYCD": [kp.A, kp.D, kp.C, kp.Y],
        "CYB": [kp.C, kp.B, kp.Y],
        "additive": [kp.D, (1.0, 0.0), top, kp.B, kp.C],
    }
    return {
        "d": d,
        "points": {k: list(v) for k, v in pts.items()},
        "lines": lines,
        "line_format": "a*f + b*fhat + c = 0",
        "polygons": {k: [list(v) for v in poly] for k, poly in polygons.items()},
        "through": {"BC": _line(kp.B, kp.C), "CY": _line(kp.C, kp.Y), "XY": _line(kp.X, kp.Y)},
    }


def _open(path):
    return sys.stdout if path in (None, "-") else open(path, "w", newline="")


def _emit_json(obj, path=None):
    fh = _open(path)
    try:
        json.dump(obj, fh, indent=2)
        fh.write("\n")
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_eval(args):
    _emit_json(asdict(evaluate(args.d, args.f, args.fhat)))
    return 0


def cmd_scan(args):
    rows = scan(args.d, args.resolution, args.measure, args.workers)
    fh = _open(args.output)
    try:
        fh.write(_header(args.d) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["f", "fhat", "value"])
        w.writerows([_fmt(a), _fmt(b), _fmt(v)] for a, b, v in rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_segment(args):
    fh = _open(args.output)
    try:
        fh.write(f"# entbound v1, d={','.join(map(str, args.d))}, base={get_config().base_label}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["d", "f", "fhat", "rains", "piece"])
        for d in args.d:
            for row in segment(d, args.npoints):
                w.writerow([row[0], _fmt(row[1]), _fmt(row[2]), _fmt(row[3]), row[4]])
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


def cmd_regions(args):
    _emit_json(regions(args.d), args.output)
    return 0


def cmd_binegative(args):
    seed = get_config().seed if args.seed is None else args.seed
    report = search_binegative(
        args.d, args.n, seed=seed, bias_boundary=not args.no_bias, shards=args.workers, workers=args.workers
    )
    out = report.to_json()
    if not args.witness:
        out["worst_state"] = None
    _emit_json(out, args.output)
    return 0


def cmd_check(args):
    from .checks import run_suites

    seed = get_config().seed if args.seed is None else args.seed
    report = run_suites(args.d, args.suite, args.budget, seed)
    _emit_json(report)
    return 0 if report["passed"] else 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--nats", action="store_true", help="natural logarithms instead of bits")
    common.add_argument("--seed", type=int, default=None)

    p = argparse.ArgumentParser(prog="entbound", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="all measures at one point")
    e.add_argument("-d", type=int, required=True)
    e.add_argument("-f", type=float, required=True)
    e.add_argument("--fhat", type=float, required=True)
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("scan", parents=[common], help="CSV grid over the state triangle")
    s.add_argument("-d", type=int, required=True)
    s.add_argument("--resolution", type=int, default=101)
    s.add_argument("--measure", choices=MEASURES, default="areep")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_scan)

    g = sub.add_parser("segment", parents=[common], help="Rains bound along the edge AB")
    g.add_argument("-d", type=int, nargs="+", default=[3, 4, 5])
    g.add_argument("--npoints", type=int, default=201)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_segment)

    r = sub.add_parser("regions", parents=[common], help="key points, lines and polygons as JSON")
    r.add_argument("-d", type=int, required=True)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_regions)

    b = sub.add_parser("binegative", parents=[common], help="random search for binegative states")
    b.add_argument("-d", type=int, required=True)
    b.add_argument("-n", type=int, default=10_000)
    b.add_argument("--no-bias", action="store_true")
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--witness", action="store_true", help="include the worst matrix")
    b.add_argument("-o", "--output")
    b.set_defaults(func=cmd_binegative)

    c = sub.add_parser("check", parents=[common], help="run oracle suites")
    c.add_argument("-d", type=int, default=3)
    c.add_argument("--suite", action="append", help="repeatable; default all")
    c.add_argument("--budget", choices=("quick", "default", "full"), default="default")
    c.set_defaults(func=cmd_check)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "suite", None):
        from .checks import SUITES

        unknown = [s for s in args.suite if s not in SUITES]
        if unknown:
            parser.error(f"unknown suite(s): {', '.join(unknown)}")
    changes = {}
    if args.nats:
        changes["log_base"] = math.e
    if args.seed is not None:
        changes["seed"] = args.seed
    try:
        with using(**changes):
            return args.func(args)
    except (EntboundError, ValueError, OSError) as exc:
        print(f"entbound: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
