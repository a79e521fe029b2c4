"""Acceptance suite: one test per criterion, each recording a verdict line.

Tolerances and parameter grids are pinned below; the terminal summary prints
one PASS/FAIL line per criterion (see conftest.py).
"""
from collections import Counter
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import stats

from acceptance_report import record
from fivevertex import checks, thermo
from fivevertex.model import LatticeSpec, enumerate_configurations, turn_pairs
from fivevertex.sampler import (
    cftp_samples,
    disordered_components,
    measure_vertex_densities,
    sandwich_probe,
)

SWEEP_MAX_M = SWEEP_MAX_L = 7
SWEEP_XS = (Fraction(2), Fraction(3), Fraction(1, 2), Fraction(7, 5), Fraction(9, 4))
FAMILY_NS = (6, 12, 24)
DECAY_FACTOR = 3
QUARTIC_TOL = 1e-12
QUARTIC_END_TOL = 1e-10
QUARTIC_GRID = 100
FD_STEP = Fraction(1, 1000)
FD_MISMATCH = 1e-5
FD_JUMP_RATIO = 10
BARNES_TOL = 1e-3
PRINTED_ZETA = "-0.165142"
E0_NS = (6, 8, 12)
E0_X = Fraction(1, 100)
E0_DPS = 60
SAMPLES = 10 ** 4
TV_123 = 0.03
TV_244 = 0.05
PROBE_TRIALS = 10 ** 5
REDUCTION_TOL = 1e-10
CHI2_ALPHA = 1e-3


@pytest.fixture(scope="module")
def sweep():
    specs = list(checks.sweep_specs(SWEEP_MAX_M, SWEEP_MAX_L))
    return specs, checks.run_sweep(specs, checks.ALL_CHECKS, SWEEP_XS)


def _sweep_verdict(sweep, prefix):
    specs, report = sweep
    bad = [f for f in report.failures if f.check.split(":")[0] in prefix]
    return bad, len(specs)


def test_criterion_01_oracle_equivalence(sweep):
    bad, n = _sweep_verdict(sweep, ("oracle",))
    pairs = n * len(SWEEP_XS)
    ok = record("1 oracle equivalence", not bad, f"{pairs} (spec, x) pairs, {len(bad)} mismatches")
    assert ok, bad[:5]


def test_criterion_02_identities(sweep):
    bad, n = _sweep_verdict(sweep, ("degree", "symmetry", "value_at_one", "constant_at_zero"))
    ok = record("2 combinatorial identities", not bad, f"{n} specs, {len(bad)} failures")
    assert ok, bad[:5]


def test_criterion_03_painleve(sweep):
    bad, n = _sweep_verdict(sweep, ("pvi_residual",))
    ok = record("3 Painleve residual", not bad, f"{n} specs, {len(bad)} nonzero residuals")
    assert ok, bad[:5]


def test_criterion_04_expansions(sweep):
    bad, n = _sweep_verdict(sweep, ("expansion", "hahn"))
    ok = record("4 expansion coefficients", not bad, f"{n} specs x 3 points + Hahn, {len(bad)} failures")
    assert ok, bad[:5]


def _decay(rows):
    return thermo.decay_ok(rows, DECAY_FACTOR)


def _fmt_rows(rows):
    return ", ".join(mpmath.nstr(r.residual, 3) for r in rows)


@pytest.mark.parametrize("x,label", [(Fraction(16), "I"), (Fraction(1), "II"), (Fraction(1, 16), "III")])
def test_criterion_05_square_convergence(x, label):
    specs = [LatticeSpec(N, 2 * N, 2 * N) for N in FAMILY_NS]
    rows = thermo.convergence_table(specs, x, "square")
    assert all(r.regime.value == label for r in rows)
    ok = record(f"5 square x={x}", _decay(rows), f"residuals {_fmt_rows(rows)}")
    assert ok


@pytest.mark.parametrize("where", ["xc+2", "1", "1/10"])
def test_criterion_06_rect_convergence(where):
    rows = []
    for N in FAMILY_NS:
        spec = LatticeSpec(N, 3 * N, 5 * N)
        g = thermo.GeometryRect.from_spec(spec)
        with mpmath.workdps(thermo.DPS):
            x = thermo.critical_x(g) + 2 if where == "xc+2" else Fraction(where)
            rows.append(thermo.convergence_row(spec, x, "rect"))
    ok = record(f"6 rect x={where}", _decay(rows), f"residuals {_fmt_rows(rows)}")
    assert ok


@pytest.mark.parametrize("p,q", [(1, 2), (Fraction(1, 2), 3), (1, 1 + Fraction(1, 10 ** 6))])
def test_criterion_07_quartic_branch(p, q):
    with mpmath.workdps(thermo.DPS):
        xc = thermo.critical_x(thermo.GeometryRect(p, q))
        worst = max(abs(thermo.quartic_x(p, q, thermo.solve_quartic_branch(p, q, x)) - x)
                    for x in (xc * k / (QUARTIC_GRID - 1) for k in range(QUARTIC_GRID)))
        y0 = abs(thermo.solve_quartic_branch(p, q, 0) - abs(thermo._mp(p) - thermo._mp(q)))
        yc = abs(thermo.solve_quartic_branch(p, q, xc) - (xc - 1))
    ok = worst <= QUARTIC_TOL and y0 <= QUARTIC_END_TOL and yc <= QUARTIC_END_TOL
    record(f"7 quartic ({p},{q})", ok,
           f"max|x(y(x))-x| {mpmath.nstr(worst, 2)}, y(0) err {mpmath.nstr(y0, 2)}, "
           f"y(xc) err {mpmath.nstr(yc, 2)}")
    assert ok


@pytest.mark.parametrize("geometry,label", [(thermo.GeometrySquare(1, 0), "square r=1"),
                                            (thermo.GeometryRect(1, 2), "rect (1,2)")])
def test_criterion_08_third_order(geometry, label):
    rep = thermo.third_order_scan(geometry, FD_STEP)
    mismatch = max(rep.d1_mismatch, rep.d2_mismatch)
    ok = mismatch < FD_MISMATCH and rep.d3_jump > FD_JUMP_RATIO * mismatch
    record(f"8 transition {label}", ok,
           f"1st/2nd mismatch {mpmath.nstr(mismatch, 2)}, 3rd jump {mpmath.nstr(rep.d3_jump, 2)}")
    assert ok


def test_criterion_09_barnes():
    with mpmath.workdps(thermo.DPS):
        gap = abs(thermo.log_barnes_G_exact(51) - thermo.log_barnes_G_asymptotic(51))
    ok = thermo.barnes_G_int(4) == 2 and gap < BARNES_TOL
    record("9 Barnes G", ok, f"G(4) = {thermo.barnes_G_int(4)}, asymptotic gap at 51 {mpmath.nstr(gap, 3)}")
    assert ok


@pytest.mark.xfail(strict=True, reason="the printed constant has two digits transposed; "
                                       "the true value is -0.1654211...")
def test_criterion_09_zeta_digits():
    value = thermo.zeta_prime_minus_one()
    digits = len(PRINTED_ZETA.split(".")[1])
    shown = mpmath.nstr(value, digits, strip_zeros=False)
    ok = shown == PRINTED_ZETA and abs(value - mpmath.zeta(-1, derivative=1)) < 1e-30
    record("9 zeta'(-1) digits", ok, f"computed {mpmath.nstr(value, 10)} vs printed {PRINTED_ZETA}",
           expected_failure=True)
    assert ok


def test_criterion_10_e0():
    scaled = []
    with mpmath.workdps(E0_DPS):
        for N in E0_NS:
            res = thermo.e0_residual(LatticeSpec(N, 2 * N - 1, 2 * N), E0_X)
            scaled.append(abs(res) * N * N)
    ok = all(b < a for a, b in zip(scaled, scaled[1:]))
    record("10 e=0 Regime III", ok, "|residual| N^2 = " + ", ".join(mpmath.nstr(s, 3) for s in scaled))
    assert ok


def _exact_law(spec, x):
    w = {c.slices: Fraction(1) / Fraction(x) ** turn_pairs(c) for c in enumerate_configurations(spec)}
    Z = sum(w.values())
    return {k: v / Z for k, v in w.items()}


def _tv_and_chi2(spec, x, n, seed):
    law = _exact_law(spec, x)
    cnt = Counter(s.configuration.slices for s in cftp_samples(spec, x, n, seed))
    keys = sorted(law)
    obs = np.array([cnt.get(k, 0) for k in keys], dtype=float)
    exp = np.array([float(law[k]) * n for k in keys])
    tv = 0.5 * float(np.abs(obs / n - exp / n).sum())
    p = float(stats.chisquare(obs, exp).pvalue) if len(keys) > 1 else 1.0
    return tv, p, obs, exp


def test_criterion_11_sampler():
    parts, ok = [], True
    tv, _, obs, _ = _tv_and_chi2(LatticeSpec(1, 2, 3), Fraction(2), SAMPLES, seed=2024)
    freqs = obs / SAMPLES
    ok &= tv < TV_123
    parts.append(f"(1,2,3) x=2 freq {np.round(freqs, 3).tolist()} TV {tv:.4f}")
    for x in (Fraction(1, 2), Fraction(1)):
        tv, _, _, _ = _tv_and_chi2(LatticeSpec(2, 4, 4), x, SAMPLES, seed=7)
        ok &= tv < TV_244
        parts.append(f"(2,4,4) x={x} TV {tv:.4f}")
    violations = 0
    for spec, x in [(LatticeSpec(1, 2, 3), Fraction(2)), (LatticeSpec(2, 4, 4), Fraction(1, 2)),
                    (LatticeSpec(2, 4, 4), Fraction(1))]:
        violations += sandwich_probe(spec, x, PROBE_TRIALS, seed=1).violations
    ok &= violations == 0
    parts.append(f"probe violations {violations} in 3x{PROBE_TRIALS}")
    record("11 sampler exactness", bool(ok), "; ".join(parts))
    assert ok


@pytest.mark.parametrize("spec", [LatticeSpec(1, 2, 3), LatticeSpec(2, 4, 4), LatticeSpec(2, 3, 4)])
@pytest.mark.parametrize("x", [Fraction(1, 2), Fraction(1), Fraction(2)])
def test_sampler_tiny_boxes(spec, x):
    tv, p, _, _ = _tv_and_chi2(spec, x, SAMPLES, seed=31)
    ok = tv < TV_244 and p > CHI2_ALPHA
    record(f"11b {spec.as_tuple()} x={x}", ok, f"TV {tv:.4f}, chi2 p {p:.3f}")
    assert ok


def test_probe_above_one_is_reported():
    # outside the proven range the probe finds and logs order violations
    rep = sandwich_probe(LatticeSpec(2, 4, 4), 2, PROBE_TRIALS, seed=1)
    record("11c probe (2,4,4) x=2", True, f"{rep.violations} violations logged (not a criterion)")
    assert rep.violations > 0


def test_criterion_12_reduction():
    worst = 0
    for x in (Fraction(1, 4), 1, 4):
        gaps = thermo.reduction_gaps(1, x)
        worst = max(worst, gaps["f2"], gaps["f1"])
    ok = worst < REDUCTION_TOL
    record("12 reduction p=q=1", ok, f"max |f2, f1 gap| {mpmath.nstr(worst, 2)}")
    assert ok


@pytest.mark.parametrize("sqrt_x,expected", [(Fraction(6, 25), 2), (Fraction(3, 10), 1)])
def test_smoke_phase_split(sqrt_x, expected):
    spec = LatticeSpec(20, 50, 51)
    samples = cftp_samples(spec, sqrt_x ** 2, 50, seed=5)
    rep = disordered_components(measure_vertex_densities(samples, spec))
    ok = rep.components == expected
    record(f"smoke sqrt(x)={float(sqrt_x)}", ok, f"{rep.components} disordered component(s), sizes {rep.sizes}")
    assert ok
