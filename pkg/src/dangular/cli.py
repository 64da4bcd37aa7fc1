"""Command-line front end: ``dangular <command> ...`` or ``python -m dangular``.

Every command writes JSON (top-level ``"schema": 1``) or CSV.  Exit codes:
0 success, 1 computation error or failed verification, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import __version__
from .exact_series import ContractViolation
from .scheme_constants import Surface

SCHEMA = 1


def _surface(text: str) -> Surface:
    try:
        return Surface.parse(text)
    except (ValueError, ContractViolation) as e:
        raise argparse.ArgumentTypeError(str(e))


def _degrees(text: str):
    from .tree_gf import DegreeSet

    try:
        return DegreeSet.of(text)
    except (ValueError, ContractViolation) as e:
        raise argparse.ArgumentTypeError(f"bad degree set {text!r}: {e}")


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {v}")
    return v


def _num(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


def _emit(args, payload=None, rows=None, header=None):
    """Write JSON payload, or CSV rows when --format csv is chosen."""
    if getattr(args, "format", "json") == "csv" and rows is not None:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps({"schema": SCHEMA, **payload}, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------


def cmd_constants(args) -> int:
    from .char_system import solve_characteristic, verify_schema

    c = solve_characteristic(args.degrees, args.tol)
    payload = c.as_dict()
    if args.schema_check:
        r = verify_schema(args.degrees, c)
        payload["schemaResiduals"] = {"G": r.residual_G, "Gw": r.residual_Gw, "Gt": r.residual_Gt}
    _emit(args, payload)
    return 0


def cmd_tree_coeffs(args) -> int:
    from .tree_gf import legs_series, tree_series

    if args.legs:
        s = legs_series(args.degrees, args.legs, args.order, args.route)
    else:
        s = tree_series(args.degrees, max(args.order, 1)).truncate(args.order)
    coeffs = [_num(c) for c in s.coeffs]
    _emit(args, {"degrees": list(args.degrees.degrees), "legs": args.legs, "coefficients": coeffs},
          [[n, c] for n, c in enumerate(coeffs)], ["n", "coefficient"])
    return 0


def cmd_scheme_table(args) -> int:
    from .scheme_constants import scheme_table

    lo = 0 if args.orientable else 1
    genera = range(lo, args.max_genus + 1)
    table = scheme_table(args.orientable, genera, range(1, args.max_boundaries + 1))
    rows = []
    for g in genera:
        for b in range(1, args.max_boundaries + 1):
            s = Surface(args.orientable, g, b)
            rows.append([s.code, g, b, table.get((g, b))])
    _emit(args, {"orientable": args.orientable,
                 "table": [{"surface": r[0], "genus": r[1], "boundaries": r[2], "a": r[3]} for r in rows]},
          rows, ["surface", "genus", "boundaries", "a"])
    return 0


def cmd_exact_series(args) -> int:
    from .asymptotics_enum import disc_count, exact_series

    if args.surface.is_disc:
        if args.degrees.degrees != (3,):
            raise ContractViolation("disc counts implemented for triangulations only")
        coeffs = [disc_count(n) for n in range(args.order + 1)]
    else:
        A = exact_series(args.surface, args.degrees, args.order)
        coeffs = [int(c) for c in A.coefficients(args.order)]
    _emit(args, {"surface": args.surface.code, "degrees": list(args.degrees.degrees), "coefficients": coeffs},
          [[n, c] for n, c in enumerate(coeffs)], ["n", "coefficient"])
    return 0


def cmd_asymptotic(args) -> int:
    from .asymptotics_enum import asymptotic_estimate, convergence_report

    est = asymptotic_estimate(args.surface, args.degrees)
    payload = {"surface": args.surface.code, "degrees": list(args.degrees.degrees), "estimate": est.as_dict()}
    if args.n:
        payload["convergence"] = [
            {"n": r.n, "exact": str(r.exact), "ratio": r.ratio, "deviationSqrtN": r.deviation}
            for r in convergence_report(args.surface, args.degrees, args.n)]
    _emit(args, payload)
    return 0


def cmd_sample(args) -> int:
    from .sampler_limit import sample_batch

    b = sample_batch(args.surface, args.degrees, args.n, args.count, args.seed,
                     check_dissection=not args.no_dissection, threads=args.threads)
    rows = [[i, int(u), int(ok)] for i, (u, ok) in enumerate(zip(b.structuring, b.dissection))]
    args.format = "csv"
    _emit(args, None, rows, ["sampleIndex", "structuringEdges", "isDissection"])
    return 0


def cmd_limit_check(args) -> int:
    from .sampler_limit import limit_check

    res = limit_check(args.surface, args.degrees, args.n, args.samples, args.rmax, args.seed,
                      with_4n=not args.no_4n, threads=args.threads)
    _emit(args, {"surface": args.surface.code, "degrees": list(args.degrees.degrees), "seed": args.seed,
                 **res.as_dict()})
    return 0


def cmd_verify(args) -> int:
    from . import checks

    results = checks.all_checks(args.samples, args.property_samples, args.seed, args.threads)
    failed = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        if not r.passed and r.name == "table reproduction" and args.accept_errata:
            bad = [x for x in r.data["rows"] if x["published"] not in (None, x["computed"])]
            if bad and all(x.get("recurrence") == x["computed"] for x in bad):
                status = "ERRATA"
        if status == "FAIL":
            failed.append(r.name)
        print(f"{status:6s} {r.name}: {r.detail} ({r.seconds:.1f}s)", file=sys.stderr)
    _emit(args, {"passed": not failed, "failed": failed,
                 "checks": [{k: v for k, v in r.as_dict().items() if k != "data"} for r in results]})
    return 1 if failed else 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dangular", description="Counting and sampling of maps on surfaces "
                                "with boundary whose vertices all lie on the boundary.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, surface=True, fmt=False):
        if surface:
            sp.add_argument("--surface", type=_surface, required=True,
                            help="O<g>.<b>, N<g>.<b>, disc, cylinder or moebius")
        sp.add_argument("--degrees", type=_degrees, default=_degrees("3"), help="comma-separated, e.g. 3,4")
        sp.add_argument("--out", help="output file (default stdout)")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("constants", help="tau, rho, gamma of a degree set")
    common(sp, surface=False)
    sp.add_argument("--tol", type=float, default=1e-14)
    sp.add_argument("--schema-check", action="store_true", help="also report schema residuals")
    sp.set_defaults(func=cmd_constants)

    sp = sub.add_parser("tree-coeffs", help="coefficients of T_Delta or of a legs series")
    common(sp, surface=False, fmt=True)
    sp.add_argument("--order", type=_nonneg, required=True)
    sp.add_argument("--legs", type=_nonneg, default=0)
    sp.add_argument("--route", choices=("A", "B"), default="A")
    sp.set_defaults(func=cmd_tree_coeffs)

    sp = sub.add_parser("scheme-table", help="cubic scheme counts a(S)")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--orientable", dest="orientable", action="store_true")
    g.add_argument("--non-orientable", dest="orientable", action="store_false")
    sp.add_argument("--max-genus", type=_nonneg, required=True)
    sp.add_argument("--max-boundaries", type=_positive, required=True)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_scheme_table)

    sp = sub.add_parser("exact-series", help="coefficients of A_S^Delta")
    common(sp, fmt=True)
    sp.add_argument("--order", type=_nonneg, required=True)
    sp.set_defaults(func=cmd_exact_series)

    sp = sub.add_parser("asymptotic", help="asymptotic constant and convergence table")
    common(sp)
    sp.add_argument("--n", type=_positive, nargs="*", default=[])
    sp.set_defaults(func=cmd_asymptotic)

    for name, func in (("sample", cmd_sample), ("limit-check", cmd_limit_check)):
        sp = sub.add_parser(name, help="uniform samples as CSV" if name == "sample" else
                            "moments and non-dissection fractions as JSON")
        common(sp)
        sp.add_argument("--n", type=_positive, required=True)
        sp.add_argument("--seed", type=int, required=True)
        sp.add_argument("--threads", type=_positive, default=1)
        if name == "sample":
            sp.add_argument("--count", type=_positive, required=True)
            sp.add_argument("--no-dissection", action="store_true", help="skip the dissection test")
        else:
            sp.add_argument("--samples", type=_positive, required=True)
            sp.add_argument("--rmax", type=_nonneg, default=4)
            sp.add_argument("--no-4n", action="store_true", help="skip the run at size 4n")
        sp.set_defaults(func=func)

    sp = sub.add_parser("verify", help="run the acceptance checks")
    sp.add_argument("--seed", type=int, default=None, help="sampling seed (default: the fixed acceptance seed)")
    sp.add_argument("--samples", type=_positive, default=100_000)
    sp.add_argument("--property-samples", type=_positive, default=10_000)
    sp.add_argument("--threads", type=_positive, default=1)
    sp.add_argument("--accept-errata", action="store_true",
                    help="count table cells that differ from the published values but match the "
                         "independent recurrence as errata rather than failures")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify" and args.seed is None:
        from .checks import DEFAULT_SEED

        args.seed = DEFAULT_SEED
    try:
        return args.func(args)
    except (ContractViolation, ValueError, OverflowError) as e:
        err = {"schema": SCHEMA, "error": {"type": type(e).__name__, "message": str(e), "command": args.command}}
        sys.stderr.write(json.dumps(err) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
