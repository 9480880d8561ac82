"""Command-line interface.

Exit codes: 0 success, 1 internal, config or parse error (and failed verify
suites), 2 domain-undefined results such as HitsPartition or NotCertified.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from .addresses import INFINITY, parse_address
from .combinatorics import nwt_search
from .config import RunConfig, load_config
from .errors import (
    BouquetError,
    CertificateStall,
    HitsPartition,
    NotCertified,
    NotExponentiallyBounded,
    SearchBudgetExceeded,
)
from .itinerary import itinerary, kneading
from .model import classify, t_min, t_star
from .rays import RayFailure, ray_polyline

EXIT_OK, EXIT_ERROR, EXIT_UNDEFINED = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _finite(v):
    v = float(v)
    return v if math.isfinite(v) else None


def _interval(c) -> list:
    """``[lo, hi]`` with ``null`` for an unbounded end."""
    return [_finite(c.lo), _finite(c.hi)]


def potential_record(text: str, tol: float, depth: int, orbit_depth: int) -> dict:
    a = parse_address(text)
    ts = t_star(a, depth)
    rec = {
        "addr": str(a),
        "t_star": _interval(ts),
        "t_star_tag": ts.tag.value,
        "class": classify(a, min(depth, 6)).value,
        "depth": depth,
        "tol": tol,
        "t_min": None,
    }
    try:
        rec["t_min"] = _interval(t_min(a, tol, orbit_depth, depth))
    except NotExponentiallyBounded as e:
        rec["t_min_error"] = f"NotExponentiallyBounded: {e}"
    except CertificateStall as e:
        rec["t_min_error"] = f"CertificateStall: {e}"
    return rec


def cmd_potential(args, cfg: RunConfig) -> int:
    print(_dump(potential_record(args.address, cfg.tol, cfg.depth, cfg.orbit_depth)))
    return EXIT_OK


def _partition(text: str):
    s = parse_address(text)
    if s is INFINITY:
        raise BouquetError("the partition address must not be 'inf'")
    return s


def cmd_itinerary(args, cfg: RunConfig) -> int:
    s = _partition(args.s)
    r = parse_address(args.r)
    try:
        it = itinerary(s, r, args.length)
    except HitsPartition as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNDEFINED
    print(_dump(it.to_dict()) if args.json else str(it))
    return EXIT_OK


def cmd_kneading(args, cfg: RunConfig) -> int:
    s = _partition(args.s)
    k = kneading(s, args.length, args.convention)
    print(_dump(k.to_dict()) if args.json else str(k))
    return EXIT_OK


def cmd_nwt(args, cfg: RunConfig) -> int:
    jobs = args.jobs or cfg.jobs
    try:
        summary = nwt_search(args.entries, args.period, args.preperiod, args.horizon, args.window, jobs=jobs, budget=args.budget)
        out, code = summary.to_dict(), EXIT_OK
    except SearchBudgetExceeded as e:
        out, code = e.summary.to_dict(), EXIT_ERROR
        out["budget_exceeded"] = True
    print(_dump(out))
    if out["survivors"]:
        print(f"error: {len(out['survivors'])} triangles survived the horizon", file=sys.stderr)
        return EXIT_ERROR
    return code


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def parse_t_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return float(parts[0]), float(parts[0]), 1
        lo, hi, n = parts
        return float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None


CSV_FIELDS = ("addr", "t", "re", "im", "residual", "depth")


def _write_csv(fh, samples: list) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for s in samples:
        row = s.to_row()
        w.writerow([row["addr"]] + ["%.17g" % row[k] for k in ("t", "re", "im", "residual")] + [row["depth"]])


def cmd_ray(args, cfg: RunConfig) -> int:
    lo, hi, n = args.t
    Q = cfg.Q if args.Q is None else args.Q
    depth = cfg.ray_depth if args.depth is None else args.depth
    tol = cfg.ray_tol if args.tol is None else args.tol
    polylines = {}
    accepted, failures = [], []
    for text in args.addresses:
        s = parse_address(text)
        out = ray_polyline(args.a, s, lo, hi, n, depth, tol, Q)
        good = [x for x in out if not isinstance(x, RayFailure)]
        failures.extend(x for x in out if isinstance(x, RayFailure))
        polylines[str(s)] = good
        accepted.extend(good)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            _write_csv(fh, accepted)
    else:
        _write_csv(sys.stdout, accepted)
    if args.svg:
        from .plotting import rays_svg

        rays_svg(polylines, args.svg, args.a)
    for f in failures:
        print(f"rejected {f.addr} t={f.t!r}: {f.error}: {f.message}", file=sys.stderr)
    return EXIT_UNDEFINED if failures else EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    from . import suites

    seed = cfg.seed if args.seed is None else args.seed
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        fn = suites.SUITES[name]
        if name == "nwt":
            if args.entries is not None:
                cfg_tuple = (args.entries, args.period, args.preperiod, args.horizon, args.window)
                res = fn(configs=(cfg_tuple,), jobs=args.jobs or cfg.jobs)
            else:
                res = fn(jobs=args.jobs or cfg.jobs)
        else:
            res = fn(seed=seed)
        results.append(res)
    report = {
        "seed": seed,
        "suites": [_strip_timing(r.to_dict(), args.timings) for r in results],
        "passed": all(r.passed for r in results),
    }
    text = _dump(report)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.cases} cases)", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_ERROR


def _strip_timing(d: dict, keep: bool) -> dict:
    if not keep:
        d.pop("seconds", None)
    return d


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bouquet", description="Exponential-dynamics model, itineraries and rays.")
    p.add_argument("--config", help="key = value config file")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("potential", help="t* bounds, certified t_min and speed class")
    sp.add_argument("address")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--depth", type=int)
    sp.set_defaults(func=cmd_potential)

    sp = sub.add_parser("itinerary", help="itinerary of r with respect to s")
    sp.add_argument("s")
    sp.add_argument("r")
    sp.add_argument("length", type=int)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_itinerary)

    sp = sub.add_parser("kneading", help="kneading sequence of s")
    sp.add_argument("s")
    sp.add_argument("length", type=int)
    sp.add_argument("--convention", choices=("shifted", "prefixed"), default="shifted")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_kneading)

    sp = sub.add_parser("nwt-search", help="exhaustive wandering-triangle refutation")
    sp.add_argument("--entries", type=int, required=True)
    sp.add_argument("--period", type=int, required=True)
    sp.add_argument("--preperiod", type=int, default=0)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--window", type=int, default=2)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--budget", type=int, help="maximum number of triangles")
    sp.set_defaults(func=cmd_nwt)

    sp = sub.add_parser("ray", help="trace dynamic rays; CSV to stdout or --csv, optional SVG")
    sp.add_argument("-a", type=parse_complex, required=True, help="parameter a, e.g. -2 or 1+1i")
    sp.add_argument("addresses", nargs="+")
    sp.add_argument("--t", type=parse_t_range, required=True, help="lo:hi:n potential grid")
    sp.add_argument("--csv")
    sp.add_argument("--svg")
    sp.add_argument("--depth", type=int)
    sp.add_argument("--tol", type=float)
    sp.add_argument("--Q", type=float)
    sp.set_defaults(func=cmd_ray)

    from .suites import SUITES

    sp = sub.add_parser("verify", help="run a named property suite")
    sp.add_argument("suite", choices=sorted(SUITES) + ["all"])
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--out", help="also write the JSON report here")
    sp.add_argument("--timings", action="store_true", help="include wall-clock seconds (not reproducible)")
    sp.add_argument("--entries", type=int)
    sp.add_argument("--period", type=int, default=2)
    sp.add_argument("--preperiod", type=int, default=0)
    sp.add_argument("--horizon", type=int, default=8)
    sp.add_argument("--window", type=int, default=2)
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        overrides = {k: getattr(args, k, None) for k in ("tol", "depth")}
        cfg = cfg.updated(**overrides)
        return args.func(args, cfg)
    except NotCertified as e:
        print(f"error: NotCertified: {e}", file=sys.stderr)
        return EXIT_UNDEFINED
    except HitsPartition as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNDEFINED
    except BouquetError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
