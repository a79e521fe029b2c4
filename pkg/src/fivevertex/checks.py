"""Exact consistency checks over a sweep of small lattices.

Each check returns a list of ``CheckFailure`` records; an empty list means the
spec passed.  The sweep driver collects them so the CLI and the test-suite
share one implementation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .hankel import P_at_one, P_via_pnew, P_via_zhom1, P_via_zhom2, leading_constant_at_zero
from .model import LatticeSpec, SpecError, brute_force_P, literal_P
from .painleve import (
    coeffs_at_infinity,
    coeffs_at_one,
    coeffs_at_zero,
    hahn_kappas,
    pvi_residual_for_spec,
    series_coeffs,
)
from .polynomial import ExactPolynomial, fraction_str

SWEEP_XS = (Fraction(2), Fraction(3), Fraction(1, 2), Fraction(7, 5), Fraction(9, 4))
EXPANSION_POINTS = ("infinity", "zero", "one")


@dataclass(frozen=True)
class CheckFailure:
    spec: tuple[int, int, int]
    check: str
    detail: str

    def to_json(self) -> dict:
        return {"spec": list(self.spec), "check": self.check, "detail": self.detail}


def sweep_specs(max_M: int = 7, max_L: int = 7) -> Iterator[LatticeSpec]:
    for M in range(1, max_M + 1):
        for L in range(1, max_L + 1):
            for N in range(0, min(M, L) + 1):
                yield LatticeSpec(N, M, L)


def _fail(spec: LatticeSpec, check: str, detail: str) -> CheckFailure:
    return CheckFailure(spec.as_tuple(), check, detail)


def check_oracles(spec: LatticeSpec, xs: Sequence[Fraction] = SWEEP_XS,
                  P: ExactPolynomial | None = None) -> list[CheckFailure]:
    """enum = pnew = zhom1 = zhom2 at every x."""
    if P is None:
        P = brute_force_P(spec)
    out = []
    for x in xs:
        want = P(1 / x)
        for name, route in (("pnew", P_via_pnew), ("zhom1", P_via_zhom1), ("zhom2", P_via_zhom2)):
            got = route(spec, x)
            if got != want:
                out.append(_fail(spec, f"oracle:{name}",
                                 f"x={fraction_str(x)}: enum {fraction_str(want)} vs {fraction_str(got)}"))
    return out


def _top_degree(P: ExactPolynomial) -> int:
    return max(P.to_dict())


def check_identities(spec: LatticeSpec, P: ExactPolynomial | None = None) -> list[CheckFailure]:
    """Degree, duality symmetry, value at x = 1 and the x -> 0 constant."""
    N, M, L = spec.as_tuple()
    if P is None:
        P = literal_P(spec)
    out = []
    deg = N * min(M - N, L - N - 1)
    if _top_degree(P) != deg:
        out.append(_fail(spec, "degree", f"expected {deg}, got {_top_degree(P)}"))
    try:
        dual = spec.dual()
    except SpecError:
        dual = None
    if dual is not None and literal_P(dual) != P:
        out.append(_fail(spec, "symmetry", f"P differs from P{dual.as_tuple()}"))
    if P(1) != P_at_one(spec):
        out.append(_fail(spec, "value_at_one", f"{fraction_str(P(1))} vs {fraction_str(P_at_one(spec))}"))
    # x -> 0 is u -> infinity: P ~ C u^deg
    C = leading_constant_at_zero(spec if L <= M + 1 else spec.dual())
    if P.coefficient(deg) != C:
        out.append(_fail(spec, "constant_at_zero", f"{fraction_str(P.coefficient(deg))} vs {fraction_str(C)}"))
    return out


def check_painleve(spec: LatticeSpec, P: ExactPolynomial | None = None) -> list[CheckFailure]:
    if P is None:
        P = literal_P(spec)
    res = pvi_residual_for_spec(spec, P)
    return [] if res.is_zero() else [_fail(spec, "pvi_residual", "residual is not identically zero")]


_FORMULAS: dict[str, Callable] = {
    "infinity": coeffs_at_infinity,
    "zero": coeffs_at_zero,
    "one": coeffs_at_one,
}


def check_expansions(spec: LatticeSpec, P: ExactPolynomial | None = None) -> list[CheckFailure]:
    """Closed-form C, kappa_1, kappa_2 against the series of P, plus the Hahn route."""
    if P is None:
        P = brute_force_P(spec)
    out = []
    at_one = None
    for point in EXPANSION_POINTS:
        want = _FORMULAS[point](spec)
        got = series_coeffs(spec, point, P)
        if point == "one":
            at_one = got
        for name in ("C", "kappa1", "kappa2"):
            if getattr(want, name) != getattr(got, name):
                out.append(_fail(spec, f"expansion:{point}:{name}",
                                 f"formula {fraction_str(getattr(want, name))} vs series "
                                 f"{fraction_str(getattr(got, name))}"))
    for closed in (False, True):
        hk = hahn_kappas(spec, closed=closed)
        if hk is None:
            continue
        if hk != (at_one.kappa1, at_one.kappa2):
            label = "closed" if closed else "recurrence"
            out.append(_fail(spec, f"hahn:{label}",
                             f"({fraction_str(hk[0])}, {fraction_str(hk[1])}) vs "
                             f"({fraction_str(at_one.kappa1)}, {fraction_str(at_one.kappa2)})"))
    return out


ALL_CHECKS = ("oracles", "identities", "painleve", "expansions")


@dataclass
class SweepReport:
    specs: int = 0
    evaluations: int = 0
    failures: list[CheckFailure] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"specs": self.specs, "evaluations": self.evaluations, "pass": self.passed,
                "failures": [f.to_json() for f in self.failures]}


def run_sweep(specs: Iterable[LatticeSpec], checks: Sequence[str] = ALL_CHECKS,
              xs: Sequence[Fraction] = SWEEP_XS) -> SweepReport:
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks {sorted(unknown)}")
    report = SweepReport()
    for spec in specs:
        report.specs += 1
        lit = literal_P(spec)
        conv = ExactPolynomial.constant(1) if spec.L == spec.N else lit
        if "oracles" in checks:
            report.evaluations += len(xs)
            report.failures += check_oracles(spec, xs, conv)
        if "identities" in checks:
            report.failures += check_identities(spec, lit)
        if "painleve" in checks:
            report.failures += check_painleve(spec, lit)
        if "expansions" in checks:
            report.failures += check_expansions(spec, conv)
    return report
