"""Command-line front end: build, verify, factor, rootcheck, reconstruct.

Exit codes follow one convention across all subcommands: 0 when every
requested check passed, 1 when the computation ran but a check failed (a
bundle or solution file is still written so the failure can be audited),
and 2 for unusable input: unknown flags, malformed files, wrong point
counts, bad group labels.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time

from .bundlejson import (
    FORMAT_VERSION,
    decode_matrix,
    decode_series,
    encode_matrix,
    load_bundle,
    save_bundle,
)
from .errors import (
    FormatError,
    InvalidPointsError,
    PPVError,
    PrecisionExhaustedError,
    WrongPointCountError,
)
from .patching import PatchProblem, factor_simultaneous, verify_patch
from .pipeline import DEFAULT_PREC, build_bundle, default_points, plan_seeds, verify_bundle
from .rational import RatFunc, rat, rat_str
from .rootdata import (
    RootDatum,
    check_generation_hypotheses,
    check_reflection_identity,
    grid_eq,
    grid_mul,
)
from .seeds import family_descriptor, log_series
from .series import INF
from .tower import reconstruct, required_precision

DEFAULT_RNG_SEED = 20260815


def _print(*args) -> None:
    print(*args)


def _fail(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _parse_points(text: str) -> list:
    try:
        return [rat(p.strip()) for p in text.split(",") if p.strip() != ""]
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad point list {text!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# build / verify


def cmd_build(args) -> int:
    points = _parse_points(args.points) if args.points else None
    t0 = time.perf_counter()
    bundle = build_bundle(
        args.group, points=points, prec=args.prec, threads=args.threads
    )
    elapsed = time.perf_counter() - t0
    save_bundle(bundle, args.out)
    for line in bundle.report.summary_lines():
        _print(line)
    _print(f"bundle written to {args.out} ({elapsed:.2f}s)")
    return 0 if bundle.report.ok else 1


def cmd_verify(args) -> int:
    bundle = load_bundle(args.bundle)
    # the stored report is ignored; every invariant is recomputed from data
    report = verify_bundle(bundle)
    for line in report.summary_lines():
        _print(line)
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# factor


def _load_factor_input(args):
    if args.from_bundle:
        bundle = load_bundle(args.from_bundle)
        return bundle.points, bundle.prec, [s.Y_local for s in bundle.seeds]
    if not args.input:
        raise FormatError("factor needs --in FILE or --from-bundle BUNDLE")
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {args.input}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("factor input must be a JSON object")
    try:
        points = [rat(p) for p in doc["points"]]
        prec = int(doc["precision"])
        mats_doc = doc["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"factor input missing points/precision/matrices: {exc}") from exc
    if not isinstance(mats_doc, list):
        raise FormatError("'matrices' must be a list")
    mats = [
        decode_matrix(m, points, f"matrices[{i}]") for i, m in enumerate(mats_doc)
    ]
    return points, prec, mats


def cmd_factor(args) -> int:
    points, prec, mats = _load_factor_input(args)
    problem = PatchProblem(points, mats, prec)
    solution = factor_simultaneous(problem)
    report = verify_patch(problem, solution)
    doc = {
        "format_version": FORMAT_VERSION,
        "points": [rat_str(p) for p in points],
        "precision": prec,
        "achieved_order": solution.achieved_order,
        "Y": encode_matrix(solution.Y),
        "Z": [encode_matrix(z) for z in solution.Z],
        "checks": {
            "ok": report.ok,
            "residual_orders": report.residual_orders,
            "y_in_global_ring": report.y_in_global_ring,
            "z_in_local_ring": report.z_in_local_ring,
            "unit_mod_t": report.unit_mod_t,
            "det_relation": report.det_relation,
            "notes": report.notes,
        },
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    _print(f"achieved order {solution.achieved_order}, residual orders {report.residual_orders}")
    _print(f"Y in global ring: {report.y_in_global_ring}; Z local: {all(report.z_in_local_ring)}")
    _print(f"solution written to {args.out}")
    return 0 if report.ok else 1


# ---------------------------------------------------------------------------
# rootcheck


def _reflection_at_value(rd: RootDatum, root: tuple, value) -> bool:
    """The reflection identity specialized at one nonzero rational f-value."""
    f = RatFunc.from_ground(value)
    neg = tuple(-v for v in root)
    lhs = grid_mul(grid_mul(rd.u(root, f), rd.u(neg, -f.inv())), rd.u(root, f))
    rhs = grid_mul(rd.coroot(root, f), rd.weyl_rep(root))
    return grid_eq(lhs, rhs)


def cmd_rootcheck(args) -> int:
    rd = RootDatum.from_label(args.group)
    rng = random.Random(args.rng_seed)
    ok = True
    for root in rd.roots:
        formal = check_reflection_identity(rd, root)
        sampled = all(
            _reflection_at_value(rd, root, rat(rng.randint(1, 10**6)) / rat(rng.randint(1, 10**3)))
            for _ in range(args.samples)
        )
        status = "pass" if formal and sampled else "FAIL"
        ok = ok and formal and sampled
        _print(f"root {root}: reflection identity {status} (formal + {args.samples} sampled values)")
    # the descriptor list a full build would realize, without building one
    plans = plan_seeds(rd, default_points(rd.m))
    gen = check_generation_hypotheses(
        rd, [family_descriptor(p.family, p.root) for p in plans]
    )
    _print(
        f"generation hypotheses: {'pass' if gen.ok else 'FAIL'} "
        f"({gen.checked} conditions{'' if gen.ok else ', missing ' + str(gen.missing)})"
    )
    return 0 if ok and gen.ok else 1


# ---------------------------------------------------------------------------
# reconstruct


def cmd_reconstruct(args) -> int:
    if args.probe_f is not None:
        q = rat(args.probe_f)
        prec = args.prec if args.prec else DEFAULT_PREC
        series = log_series(q, prec)
        points = [q]
    else:
        if not args.input:
            raise FormatError("reconstruct needs --in FILE or --probe-f Q")
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise FormatError(f"cannot read {args.input}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise FormatError(f"not valid JSON: {exc}") from exc
        if not isinstance(doc, dict) or "series" not in doc:
            raise FormatError("reconstruct input must be an object with a 'series' field")
        points = [rat(p) for p in doc.get("points", [])]
        series = decode_series(doc["series"], points, "series")
    prec = args.prec if args.prec else (series.prec if series.prec is not INF else DEFAULT_PREC)
    need = required_precision(args.dx)
    if need > prec:
        _fail(f"x-degree {args.dx} needs series order {need}, only {prec} available")
        return 2
    result = reconstruct(series.truncate(prec), args.dx, prec)
    if result.success:
        p, q = result.as_series_pair(result.verified_order)
        _print(f"certificate found at x-degree {args.dx}, verified to order {result.verified_order}")
        _print(f"  numerator cols:   {[str(s) for s in result.numerator]}")
        _print(f"  denominator cols: {[str(s) for s in result.denominator]}")
        _print(f"  residual Q*a - P vanishes mod t^{result.verified_order}: "
               f"{(q * series - p).truncate(result.verified_order).is_zero}")
        return 0
    _print(
        f"inconclusive at bounds (x-degree {result.degree_bounds[0]}, "
        f"t-degree {result.degree_bounds[1]}): no certificate exists at these degrees"
    )
    return 1


# ---------------------------------------------------------------------------
# wiring


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppvforge",
        description="Build and verify parameterized differential equations "
        "with prescribed unipotent local behavior, in exact arithmetic.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="run the whole construction for one group")
    p.add_argument("--group", required=True, help="group label: A1, A2, ... or C2")
    p.add_argument("--points", help="comma-separated rational points (default 0..4m-1)")
    p.add_argument("--prec", type=int, default=DEFAULT_PREC, help="t-adic working order")
    p.add_argument("--out", required=True, help="bundle output path")
    p.add_argument("--threads", type=int, default=1, help="parallel seed/reconstruction workers")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("verify", help="recompute every check on a stored bundle")
    p.add_argument("bundle", help="bundle file to verify")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("factor", help="simultaneously factor matrices that are I mod t")
    p.add_argument("--in", dest="input", help="JSON with points, precision, matrices")
    p.add_argument("--from-bundle", help="factor the local matrices stored in a bundle")
    p.add_argument("--out", required=True, help="solution output path")
    p.set_defaults(handler=cmd_factor)

    p = sub.add_parser("rootcheck", help="reflection identities and generation hypotheses")
    p.add_argument("--group", required=True, help="group label: A1, A2, ... or C2")
    p.add_argument("--rng-seed", type=int, default=DEFAULT_RNG_SEED,
                   help="seed for the sampled specializations")
    p.add_argument("--samples", type=int, default=3,
                   help="random f-values per root on top of the formal check")
    p.set_defaults(handler=cmd_rootcheck)

    p = sub.add_parser("reconstruct", help="search for a rational certificate for a series")
    p.add_argument("--in", dest="input", help="JSON with a 'series' field (and optional 'points')")
    p.add_argument("--probe-f", help="instead of a file, probe the logarithmic series at this point")
    p.add_argument("--dx", type=int, required=True, help="x-degree bound for both sides")
    p.add_argument("--prec", type=int, help="t-adic order to use (default: what the series carries)")
    p.set_defaults(handler=cmd_reconstruct)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.handler(args)
    except FormatError as exc:
        _fail(str(exc))
        return 2
    except (WrongPointCountError, InvalidPointsError, PrecisionExhaustedError) as exc:
        _fail(str(exc))
        return 2
    except PPVError as exc:
        _fail(f"{type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
