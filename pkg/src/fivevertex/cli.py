"""Command-line front end.

Every subcommand writes JSON (or CSV, or an image) and returns 0 on success,
1 when a check fails or a computation errors out, and 2 on bad usage.  Errors
are printed to stdout as ``{"error": code, "message": text}``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings
from fractions import Fraction
from typing import Callable, Optional, Sequence

import mpmath

from . import checks, thermo
from .hankel import DomainError, P_exact_polynomial, P_via_pnew, P_via_zhom1, P_via_zhom2
from .model import LatticeSpec, ResourceError, SpecError, StructuralError, brute_force_P, literal_P
from .painleve import coeffs_at_infinity, coeffs_at_one, coeffs_at_zero, pvi_residual_for_spec, \
    sigma_series_check, series_coeffs
from .polynomial import fraction_str

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would print to stderr and exit(2)
        raise UsageError(message)


def _emit(obj, out) -> None:
    out.write(json.dumps(obj, sort_keys=False) + "\n")


def _fail_json(code: str, message: str, out, extra: Optional[dict] = None) -> None:
    payload = {"error": code, "message": message}
    if extra:
        payload.update(extra)
    _emit(payload, out)


# -- argument types ------------------------------------------------------------

def rational(text: str) -> Fraction:
    """'p/q', an integer or a terminating decimal, read exactly."""
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}")
    return value


def real_or_relative(text: str):
    """A rational, a decimal, 'inf', or 'xc', 'xc+d', 'xc-d', 'xc*d' relative to the critical point."""
    t = text.strip().replace(" ", "")
    if t.startswith("xc"):
        rest = t[2:]
        if rest and rest[0] not in "+-*":
            raise argparse.ArgumentTypeError(f"bad relative point {text!r}")
        if rest:
            rational(rest[1:])
        return t
    if t in ("inf", "infinity"):
        return mpmath.inf
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")


def resolve_x(value, geometry: thermo.Geometry):
    if not isinstance(value, str):
        return value
    xc = thermo.critical_x(geometry)
    if value == "xc":
        return xc
    op, d = value[2], thermo._mp(rational(value[3:]))
    return {"+": xc + d, "-": xc - d, "*": xc * d}[op]


def int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def spec_triple(text: str) -> LatticeSpec:
    vals = int_list(text)
    if len(vals) != 3:
        raise argparse.ArgumentTypeError(f"expected N,M,L: {text!r}")
    return LatticeSpec(*vals)


def _spec(args) -> LatticeSpec:
    return LatticeSpec(args.N, args.M, args.L)


def _add_spec(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--N", type=int, required=required)
    p.add_argument("--M", type=int, required=required)
    p.add_argument("--L", type=int, required=required)


def _fmt(v, digits: int) -> str:
    if isinstance(v, Fraction):
        return fraction_str(v)
    return mpmath.nstr(v, digits)


# -- exact ---------------------------------------------------------------------

ROUTES: dict[str, Callable] = {"pnew": P_via_pnew, "zhom1": P_via_zhom1, "zhom2": P_via_zhom2}


def cmd_exact(args, out) -> int:
    spec = _spec(args)
    rec = {"spec": spec.to_json(), "method": args.method}
    if args.x is None:
        if args.method == "enum":
            P = literal_P(spec) if args.literal else brute_force_P(spec)
        elif args.method == "pnew":
            P = P_exact_polynomial(spec)
        else:
            raise UsageError(f"--method {args.method} evaluates at a point; pass --x")
        rec.update({"variable": "u = 1/x", "polynomial": P.format("u"), "coefficients": P.to_json()})
    else:
        x = args.x
        if x == 0:
            raise DomainError("x = 0 is a pole of P(1/x)")
        if args.method == "enum":
            P = literal_P(spec) if args.literal else brute_force_P(spec)
            value = P(1 / x)
        else:
            value = ROUTES[args.method](spec, x)
        rec.update({"x": fraction_str(x), "value": fraction_str(value)})
    _emit(rec, out)
    return EXIT_OK


# -- oracle sweep -----------------------------------------------------------------

def cmd_oracle_sweep(args, out) -> int:
    xs = args.x or list(checks.SWEEP_XS)
    specs = checks.sweep_specs(args.max_M, args.max_L)
    report = checks.run_sweep(specs, args.checks, xs)
    rec = report.to_json()
    rec["x"] = [fraction_str(x) for x in xs]
    rec["checks"] = list(args.checks)
    _emit(rec, out)
    return EXIT_OK if report.passed else EXIT_FAIL


# -- sigma check ------------------------------------------------------------------

def cmd_sigma_check(args, out) -> int:
    spec = _spec(args)
    lit = literal_P(spec)
    conv = brute_force_P(spec)
    residual_zero = pvi_residual_for_spec(spec, lit).is_zero()
    formulas = {"infinity": coeffs_at_infinity, "zero": coeffs_at_zero, "one": coeffs_at_one}
    points = {}
    ok = residual_zero
    for point in ("infinity", "zero", "one"):
        series = sigma_series_check(spec, point, conv)
        want, got = formulas[point](spec), series_coeffs(spec, point, conv)
        coeff_ok = all(getattr(want, k) == getattr(got, k) for k in ("C", "kappa1", "kappa2"))
        ok = ok and series.passed and coeff_ok
        points[point] = {
            "C": fraction_str(got.C), "kappa1": fraction_str(got.kappa1),
            "kappa2": fraction_str(got.kappa2), "coefficients_match": coeff_ok,
            "sigma_series": series.to_json(),
        }
    _emit({"spec": spec.to_json(), "pvi_residual_zero": residual_zero, "points": points,
           "pass": ok}, out)
    return EXIT_OK if ok else EXIT_FAIL


# -- thermo -----------------------------------------------------------------------

def _geometry(args) -> thermo.Geometry:
    if args.N is not None or args.M is not None or args.L is not None:
        if None in (args.N, args.M, args.L):
            raise UsageError("--N, --M and --L go together")
        return thermo.geometry_for(_spec(args), args.geometry)
    if args.geometry == "square":
        if args.r is None:
            raise UsageError("square geometry needs --r (and optionally --eps)")
        return thermo.GeometrySquare(args.r, args.eps)
    if args.p is None or args.q is None:
        raise UsageError("rect geometry needs --p and --q")
    return thermo.GeometryRect(args.p, args.q)


def _add_geometry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--geometry", choices=("square", "rect"), required=True)
    p.add_argument("--r", type=rational)
    p.add_argument("--eps", type=int, default=0)
    p.add_argument("--p", type=rational)
    p.add_argument("--q", type=rational)
    _add_spec(p, required=False)


def cmd_thermo(args, out) -> int:
    with mpmath.workdps(args.precision):
        geometry = _geometry(args)
        x = thermo._mp(resolve_x(args.x, geometry))
        regimes = (thermo.Regime(args.regime),) if args.regime else thermo.classify_regime(geometry, x)
        records = []
        for reg in regimes:
            exp = thermo.f_terms(geometry, x, reg)
            rec = exp.to_json(args.precision)
            if args.at_N is not None:
                rec["log_P"] = _fmt(exp.log_P(args.at_N), args.precision)
                rec["log_wtZ"] = _fmt(exp.log_wtZ(args.at_N), args.precision)
            records.append(rec)
        payload = {
            "geometry": geometry.to_json(),
            "x": _fmt(x, args.precision),
            "x_c": _fmt(thermo.critical_x(geometry), args.precision),
            "boundary": len(records) > 1,
            "regimes": [r["regime"] for r in records],
            "expansions": records,
        }
    _emit(payload, out)
    return EXIT_OK


# -- converge ---------------------------------------------------------------------

FAMILIES = {
    "square": lambda N: LatticeSpec(N, 2 * N, 2 * N),
    "rect": lambda N: LatticeSpec(N, 3 * N, 5 * N),
    "e0": lambda N: LatticeSpec(N, 2 * N - 1, 2 * N),
}


def _e0_row(spec: LatticeSpec, x) -> thermo.ConvergenceRow:
    xr = thermo.rational_point(x)
    geometry = thermo.GeometrySquare.from_spec(spec)
    exact = thermo.exact_log_wtZ(spec, xr)
    pred = thermo.e0_regimeIII_prediction(geometry.r, spec.N, thermo._mp(xr))
    return thermo.ConvergenceRow(spec, xr, thermo.Regime.III, exact, pred)


def _e0_ok(rows: list[thermo.ConvergenceRow]) -> bool:
    scaled = [abs(r.residual) * r.spec.N ** 2 for r in rows]
    return all(b < a for a, b in zip(scaled, scaled[1:]))


def cmd_converge(args, out) -> int:
    if args.spec:
        specs, kind = args.spec, args.geometry
        if kind is None:
            raise UsageError("explicit --spec lists need --geometry")
    else:
        if args.family is None:
            raise UsageError("pass --family or at least one --spec")
        specs, kind = [FAMILIES[args.family](N) for N in args.Ns], args.family
    rows = []
    with mpmath.workdps(args.precision):
        for spec in specs:
            if kind == "e0":
                rows.append(_e0_row(spec, args.x))
            else:
                geometry = thermo.geometry_for(spec, kind)
                x = resolve_x(args.x, geometry)
                rows.append(thermo.convergence_row(spec, x, kind, args.regime, args.precision))
        ok = _e0_ok(rows) if kind == "e0" else thermo.decay_ok(rows)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(thermo.CSV_COLUMNS)
        for row in rows:
            w.writerow(row.as_csv_row())
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        _emit({"rows": len(rows), "output": args.output, "decay_ok": ok}, out)
    else:
        out.write(text)
    if args.check and not ok:
        return EXIT_FAIL
    return EXIT_OK


# -- phase ------------------------------------------------------------------------

PHASE_COLUMNS = ("x", "regime", "f2", "d1", "d2", "d3")


def cmd_phase(args, out) -> int:
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    with mpmath.workdps(args.precision):
        geometry = _geometry(args)
        lo = thermo._mp(resolve_x(args.x_min, geometry))
        hi = thermo._mp(resolve_x(args.x_max, geometry))
        if not 0 < lo < hi:
            raise UsageError("need 0 < x-min < x-max")
        h = thermo._mp(args.h)

        def f(t):
            return thermo.f2(geometry, t)

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(PHASE_COLUMNS)
        digits = min(args.precision, 20)
        for k in range(args.points):
            x = lo + (hi - lo) * k / (args.points - 1)
            fm2, fm1, f0, fp1, fp2 = (f(x + s * h) for s in (-2, -1, 0, 1, 2))
            d1 = (fp1 - fm1) / (2 * h)
            d2 = (fp1 - 2 * f0 + fm1) / (h * h)
            d3 = (fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * h ** 3)
            reg = "/".join(r.value for r in thermo.classify_regime(geometry, x))
            w.writerow([mpmath.nstr(x, digits), reg] + [mpmath.nstr(v, digits) for v in (f0, d1, d2, d3)])
    text = buf.getvalue()
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
        _emit({"rows": args.points, "output": args.output}, out)
    else:
        out.write(text)
    return EXIT_OK


# -- sample / probe ---------------------------------------------------------------

def cmd_sample(args, out) -> int:
    from . import render, sampler

    spec = _spec(args)
    if args.count < 1:
        raise UsageError("--count must be positive")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", sampler.MonotonicityWarning)
        samples = sampler.cftp_samples(spec, args.x, args.count, args.seed,
                                       max_sweeps=args.max_sweeps, backend=args.backend)
    notes = [str(w.message) for w in caught if issubclass(w.category, sampler.MonotonicityWarning)]
    for note in notes:
        print(note, file=sys.stderr)
    if args.archive:
        with open(args.archive, "w") as fh:
            sampler.write_archive(samples, fh)
    image = None
    if args.image:
        style = render.Style(cell=args.cell, color_vertices=args.color_vertices)
        data = render.render(samples[0].configuration, spec, args.format, style)
        with open(args.image, "wb") as fh:
            fh.write(data)
        image = args.image
    if args.archive is None:
        sampler.write_archive(samples, out)
    else:
        _emit({"samples": len(samples), "archive": args.archive, "image": image,
               "coalescence_T": [s.coalescence_T for s in samples],
               "monotonicity_warnings": notes}, out)
    return EXIT_OK


def cmd_probe(args, out) -> int:
    from . import sampler

    report = sampler.sandwich_probe(_spec(args), args.x, args.trials, args.seed, backend=args.backend)
    rec = report.to_json()
    rec["monotone_guaranteed"] = sampler.monotone_guaranteed(_spec(args), args.x)
    _emit(rec, out)
    return EXIT_OK if report.violations == 0 else EXIT_FAIL


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fivevertex", description="Five-vertex model: exact values, "
                     "asymptotics and perfect sampling.")
    parser.add_argument("--log-level", default="WARNING")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("exact", help="P at a rational point, or as a polynomial in u = 1/x")
    _add_spec(p)
    p.add_argument("--x", type=rational)
    p.add_argument("--method", choices=("enum", "pnew", "zhom1", "zhom2"), default="pnew")
    p.add_argument("--literal", action="store_true",
                   help="enum only: skip the P = 1 convention at L = N")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("oracle-sweep", help="exact checks over all small lattices")
    p.add_argument("--max-M", type=int, default=7)
    p.add_argument("--max-L", type=int, default=7)
    p.add_argument("--x", type=rational, action="append")
    p.add_argument("--checks", type=lambda s: [c for c in s.split(",") if c],
                   default=list(checks.ALL_CHECKS))
    p.set_defaults(func=cmd_oracle_sweep)

    p = sub.add_parser("sigma-check", help="Painleve residual and expansion coefficients")
    _add_spec(p)
    p.set_defaults(func=cmd_sigma_check)

    p = sub.add_parser("thermo", help="large-N expansion coefficients")
    _add_geometry(p)
    p.add_argument("--x", type=real_or_relative, required=True)
    p.add_argument("--regime", choices=[r.value for r in thermo.Regime])
    p.add_argument("--at-N", type=int, help="also evaluate the expansion at this N")
    p.add_argument("--precision", type=int, default=thermo.DPS)
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("converge", help="CSV of exact log P against the expansion")
    p.add_argument("--family", choices=tuple(FAMILIES))
    p.add_argument("--Ns", type=int_list, default=[6, 12, 24])
    p.add_argument("--spec", type=spec_triple, action="append")
    p.add_argument("--geometry", choices=("square", "rect", "e0"))
    p.add_argument("--x", type=real_or_relative, required=True)
    p.add_argument("--regime", choices=[r.value for r in thermo.Regime])
    p.add_argument("--precision", type=int, default=thermo.DPS)
    p.add_argument("--output")
    p.add_argument("--check", action="store_true", help="exit 1 unless the residual decays")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("phase", help="CSV scan of f2 with finite-difference derivatives")
    _add_geometry(p)
    p.add_argument("--x-min", type=real_or_relative, required=True)
    p.add_argument("--x-max", type=real_or_relative, required=True)
    p.add_argument("--points", type=int, default=21)
    p.add_argument("--h", type=rational, default=Fraction(1, 1000))
    p.add_argument("--precision", type=int, default=thermo.DPS)
    p.add_argument("--output")
    p.set_defaults(func=cmd_phase)

    p = sub.add_parser("sample", help="CFTP samples, archive and picture")
    _add_spec(p)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--max-sweeps", type=int, default=2 ** 20)
    p.add_argument("--backend", choices=("cython", "python"))
    p.add_argument("--archive", help="JSON-lines file; stdout when omitted")
    p.add_argument("--image")
    p.add_argument("--format", choices=("svg", "ppm"), default="svg")
    p.add_argument("--cell", type=int, default=12)
    p.add_argument("--color-vertices", action="store_true")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("probe", help="empirical sandwich test of the coupling")
    _add_spec(p)
    p.add_argument("--x", type=rational, required=True)
    p.add_argument("--trials", type=int, default=10 ** 5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=("cython", "python"))
    p.set_defaults(func=cmd_probe)
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _fail_json("usage", str(exc), out)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)
    try:
        return args.func(args, out)
    except (UsageError, SpecError, argparse.ArgumentTypeError) as exc:
        _fail_json("usage", str(exc), out)
        return EXIT_USAGE
    except DomainError as exc:
        _fail_json("domain", str(exc), out)
    except ResourceError as exc:
        _fail_json("resource", str(exc), out)
    except StructuralError as exc:
        _fail_json("structure", str(exc), out)
    except OSError as exc:
        _fail_json("io", str(exc), out)
    except RuntimeError as exc:
        diagnostics = getattr(exc, "diagnostics", None)
        code = "timeout" if diagnostics is not None else "runtime"
        _fail_json(code, str(exc), out, {"diagnostics": diagnostics} if diagnostics else None)
    except ValueError as exc:
        _fail_json("value", str(exc), out)
    return EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
