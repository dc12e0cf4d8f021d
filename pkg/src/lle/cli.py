"""Command-line front end: coefficients, spectra, scaling fits, verification.

Exit codes are a stable contract: 0 success, 1 verification failure, 2 usage
error, 3 numeric/capability error. Every output embeds the fully resolved
configuration, and repeated runs are byte-identical for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import coeffs, geometry, identities, region_sim
from .disk_spectra import disk_spectrum, entropy_from_spectrum
from .errors import (
    CapabilityError,
    DomainError,
    FitError,
    LleError,
    NumericError,
    UsageError,
    WindowError,
)
from .landau import LevelSelector, MagneticSetup

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _parse_selector(text: str) -> LevelSelector:
    head, sep, arg = text.partition(":")
    if not sep or head not in ("single", "upto"):
        raise UsageError(f"selector must be single:<l> or upto:<n>, got {text!r}")
    try:
        idx = int(arg)
    except ValueError as exc:
        raise UsageError(f"bad level index in {text!r}") from exc
    return LevelSelector(head, idx)


def _parse_region(text: str) -> geometry.Region:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"region is not valid JSON: {exc}") from exc
    return geometry.region_from_json(obj)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("LLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise UsageError(f"LLE_THREADS must be an integer, got {env!r}") from exc
    return os.cpu_count() or 1


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, default=float)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_coeff(args) -> int:
    selectors = [_parse_selector(s) for s in args.levels.split(",")]
    fns = [coeffs.spectral_function_from_spec(s) for s in args.f.split(",")]
    rows = []
    for sel in selectors:
        for fn in fns:
            value, err = coeffs.coeff_with_error(sel, fn, tol=args.tol)
            rows.append({"levels": f"{sel.kind}:{sel.index}", "f": fn.label,
                         "value": value, "error": err})
    config = {"levels": args.levels, "f": args.f, "tol": args.tol}
    if args.format == "csv":
        lines = ["levels,f,value,error"]
        lines += [f"{r['levels']},{r['f']},{r['value']:.12g},{r['error']:.3g}"
                  for r in rows]
        _write(args.out, "\n".join(lines) + "\n")
    else:
        _write(args.out, _dump({"config": config, "rows": rows}))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    region = _parse_region(args.region)
    setup = MagneticSetup(args.B)
    selector = _parse_selector(args.levels)
    config = {"region": geometry.region_to_json(region), "B": args.B,
              "levels": args.levels, "L": args.L, "solver": args.solver,
              "cutoff": args.cutoff}
    is_disk = isinstance(region, geometry.Disk)
    if args.solver in ("disk", "both") and not is_disk:
        raise UsageError("the disk sector solver needs a disk region")
    result = {}
    if args.solver in ("disk", "both"):
        spec = disk_spectrum(setup, selector, args.L * region.radius,
                             cutoff=args.cutoff)
        spec.region = geometry.region_to_json(region)
        spec.scale = args.L
        result["disk"] = spec.to_json()
    if args.solver in ("nystrom2d", "both"):
        spec2 = region_sim.region_spectrum(setup, selector, region, args.L,
                                           cutoff=args.cutoff)
        result["nystrom2d"] = spec2.to_json()
    if args.solver == "both":
        a = np.asarray(result["disk"]["eigenvalues"])
        b = np.asarray(result["nystrom2d"]["eigenvalues"])
        a = a[a > 1e-6]
        b = b[b > 1e-6]
        n = min(a.size, b.size)
        result["max_abs_diff"] = float(np.max(np.abs(a[:n] - b[:n]))) if n else 0.0
        result["count_diff"] = abs(a.size - b.size)
    payload = result[args.solver] if args.solver != "both" else result
    _write(args.out, _dump({"config": config, "result": payload}))
    return EXIT_OK


def cmd_scaling(args) -> int:
    region = _parse_region(args.region)
    if not isinstance(region, geometry.Disk):
        raise UsageError("entropy scaling runs use the disk sector solver")
    setup = MagneticSetup(args.B)
    selector = _parse_selector(args.levels)
    scales = np.arange(args.L_min, args.L_max + 1e-9, args.L_step)
    if scales.size < 3:
        raise UsageError("need at least 3 scales in the L range")
    f = coeffs.SpectralFunction.renyi(args.alpha)

    def one(L):
        spec = disk_spectrum(setup, selector, float(L) * region.radius,
                             cutoff=args.cutoff)
        return entropy_from_spectrum(spec, f)

    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        values = list(pool.map(one, scales))
    series = region_sim.ScalingSeries(
        scales=scales, values=np.asarray(values),
        meta={"alpha": args.alpha, "selector": selector.to_json(),
              "B": args.B, "region": geometry.region_to_json(region)})
    fit = region_sim.scaling_fit(series, model="linear")
    m_coeff, m_err = coeffs.coeff_with_error(selector, f, tol=1e-8)
    predicted = math.sqrt(args.B) * geometry.perimeter(region) * m_coeff
    report = {
        "config": {"region": geometry.region_to_json(region), "B": args.B,
                   "levels": args.levels, "alpha": args.alpha,
                   "L": [float(v) for v in scales], "cutoff": args.cutoff},
        "fit": fit.to_json(),
        "coefficient": {"M": m_coeff, "error": m_err},
        "predicted_c1": predicted,
        "ratio": fit.c1 / predicted,
    }
    if args.csv:
        _write(args.csv, series.to_csv())
    _write(args.out, _dump(report))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite == "all":
        report = identities.run_all_suites(cases=args.cases, seed=args.seed)
        passed = report["passed"]
    else:
        report = identities.run_suite(args.suite, cases=args.cases,
                                      seed=args.seed)
        passed = report["passed"]
    report = {"config": {"suite": args.suite, "cases": args.cases,
                         "seed": args.seed}} | report
    _write(args.out, identities.report_to_json(report))
    return EXIT_OK if passed else EXIT_VERIFY_FAIL


def cmd_rocca(args) -> int:
    region = _parse_region(args.region)
    try:
        vectors = json.loads(args.vectors)
        vectors = [(float(x), float(y)) for x, y in vectors]
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise UsageError(f"vectors must be JSON [[x,y],...]: {exc}") from exc
    t1 = geometry.roccaforte_first_order(region, vectors)
    try:
        t2 = geometry.roccaforte_second_order(region, vectors)
    except CapabilityError:
        t2 = None  # polygons carry no curvature term
    lines = ["eps,exact_removed,first_order,second_order,residual_over_eps2"]
    for k in range(args.eps_min_exp, args.eps_max_exp + 1):
        eps = 2.0 ** -k
        fam = geometry.TranslateFamily(vectors=tuple(vectors), eps=eps)
        _, removed = geometry.intersect_translates_area(region, fam)
        first = eps * t1
        if t2 is None:
            lines.append(f"{eps:.10g},{removed:.15g},{first:.15g},,")
        else:
            second = eps * t1 + eps * eps * t2
            resid = (removed - second) / (eps * eps)
            lines.append(f"{eps:.10g},{removed:.15g},{first:.15g},"
                         f"{second:.15g},{resid:.6g}")
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lle",
        description="Boundary coefficients and spectra of localized "
                    "Landau-level projections")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: env LLE_THREADS or all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeff", help="boundary coefficients M(f)")
    p.add_argument("--levels", required=True,
                   help="comma list of single:<l> / upto:<n>")
    p.add_argument("--f", required=True,
                   help="comma list of renyi:<a> / monomial:<m> / gtilde")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_coeff)

    p = sub.add_parser("spectrum", help="localized-projection eigenvalues")
    p.add_argument("--region", required=True, help="region JSON")
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--levels", required=True)
    p.add_argument("--L", type=float, required=True)
    p.add_argument("--solver", choices=("disk", "nystrom2d", "both"),
                   default="disk")
    p.add_argument("--cutoff", type=float, default=1e-12)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scaling", help="entropy area-law scaling fit")
    p.add_argument("--region", required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--levels", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--L-min", type=float, required=True)
    p.add_argument("--L-max", type=float, required=True)
    p.add_argument("--L-step", type=float, default=2.0)
    p.add_argument("--cutoff", type=float, default=1e-12)
    p.add_argument("--csv", default=None, help="also write the (L, S) series")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("verify", help="identity verification suites")
    p.add_argument("--suite", default="all",
                   help="all or one of: " + ", ".join(sorted(identities.SUITES)))
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rocca", help="translate-intersection area expansion")
    p.add_argument("--region", required=True)
    p.add_argument("--vectors", required=True, help="JSON [[x,y],...]")
    p.add_argument("--eps-min-exp", type=int, default=3,
                   help="smallest k in eps = 2^-k")
    p.add_argument("--eps-max-exp", type=int, default=9)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_rocca)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors and 0 for --help; keep the contract
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, CapabilityError, WindowError, FitError) as exc:
        print(f"numeric/capability error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except LleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
