"""Property-based checks of the structural invariants."""
import io
import json
import math
from fractions import Fraction

import mpmath
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from fivevertex import kernels, thermo, _heatbath_py
from fivevertex.cli import run
from fivevertex.hankel import P_via_pnew, P_via_zhom1, P_via_zhom2
from fivevertex.model import (
    LatticeSpec,
    brute_force_P,
    config_to_plane_partition,
    enumerate_configurations,
    macmahon_PL,
    plane_partition_to_config,
    turn_pairs,
    vertex_counts,
)
from fivevertex.polynomial import ExactPolynomial
from fivevertex.sampler import HEIGHT_DTYPE

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=7)
positive_x = st.fractions(min_value=Fraction(1, 9), max_value=9, max_denominator=9).filter(lambda v: v != 1)
polys = st.lists(fractions, max_size=5).map(ExactPolynomial)


@st.composite
def specs(draw, max_side=6):
    M = draw(st.integers(1, max_side))
    L = draw(st.integers(1, max_side))
    N = draw(st.integers(0, min(M, L)))
    return LatticeSpec(N, M, L)


@st.composite
def height_arrays(draw, max_a=5, max_b=5, max_c=5):
    a, b, c = draw(st.integers(1, max_a)), draw(st.integers(1, max_b)), draw(st.integers(1, max_c))
    u = np.array(draw(st.lists(st.floats(0, 0.999), min_size=a * b, max_size=a * b))).reshape(a, b)
    H = np.zeros((a, b), dtype=HEIGHT_DTYPE)
    _heatbath_py.sweep(H, u, 1.0, c)
    return H, c


def is_plane_partition(H, c):
    return (H.min() >= 0 and H.max() <= c and np.all(np.diff(H, axis=0) <= 0)
            and np.all(np.diff(H, axis=1) <= 0))


@given(polys, polys, polys)
def test_polynomial_ring_laws(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p + q - q == p


@given(polys, polys, fractions.filter(lambda v: v != 0))
def test_polynomial_evaluation_is_a_homomorphism(p, q, v):
    assert (p * q)(v) == p(v) * q(v)
    assert (p + q)(v) == p(v) + q(v)


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
def test_macmahon_symmetric(a, b, c):
    v = macmahon_PL(a, b, c)
    assert v == macmahon_PL(b, a, c) == macmahon_PL(c, b, a) == macmahon_PL(a, c, b)


@settings(max_examples=60, suppress_health_check=[HealthCheck.too_slow])
@given(specs(), st.data())
def test_configuration_invariants(spec, data):
    confs = list(enumerate_configurations(spec))
    conf = confs[data.draw(st.integers(0, len(confs) - 1))]
    vertex_counts(conf, spec).check(spec)
    pp = config_to_plane_partition(conf, spec)
    assert plane_partition_to_config(pp, spec) == conf
    if spec.L > spec.N:
        assert turn_pairs(conf) >= spec.N


@settings(max_examples=40, deadline=None)
@given(specs(), positive_x)
def test_routes_agree(spec, x):
    want = brute_force_P(spec)(1 / x)
    assert P_via_pnew(spec, x) == P_via_zhom1(spec, x) == P_via_zhom2(spec, x) == want
    assert want > 0


@settings(max_examples=40, deadline=None)
@given(specs().filter(lambda s: s.L > max(s.N, 1)))
def test_symmetry(spec):
    assert brute_force_P(spec) == brute_force_P(spec.dual())


@settings(max_examples=60)
@given(height_arrays(), st.floats(0.05, 20), st.data())
def test_heat_bath_preserves_order(Hc, x, data):
    H, c = Hc
    a, b = H.shape
    U = np.array(data.draw(st.lists(st.floats(0, 0.999), min_size=a * b, max_size=a * b))).reshape(a, b)
    out = H.copy()
    kernels.get_backend().sweep(out, U, x, c)
    assert is_plane_partition(out, c)
    ref = H.copy()
    _heatbath_py.sweep(ref, U, x, c)
    assert np.array_equal(out, ref)


@settings(max_examples=100)
@given(height_arrays(), st.floats(0.05, 1.0), st.floats(0, 0.999), st.data())
def test_sandwich_below_one(A, x, u, data):
    # the coupling is order preserving for x <= 1
    HA, c = A
    a, b = HA.shape
    V = np.array(data.draw(st.lists(st.floats(0, 0.999), min_size=a * b, max_size=a * b))).reshape(a, b)
    HB = np.full((a, b), c, dtype=HEIGHT_DTYPE)
    _heatbath_py.sweep(HB, V, 1.0, c)
    lo, hi = np.minimum(HA, HB), np.maximum(HA, HB)
    a, b = lo.shape
    r, j = data.draw(st.integers(0, a - 1)), data.draw(st.integers(0, b - 1))
    _heatbath_py.update_site(lo, r, j, u, x, c)
    _heatbath_py.update_site(hi, r, j, u, x, c)
    assert np.all(lo <= hi)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=8),
       st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=8),
       st.floats(0.0, 1.0))
def test_quartic_round_trip(p, q, t):
    assume(p != q)  # at p = q the branch only reaches down to 1/xc
    with mpmath.workdps(thermo.DPS):
        xc = thermo.critical_x(thermo.GeometryRect(p, q))
        x = xc * mpmath.mpf(t)
        y = thermo.solve_quartic_branch(p, q, x)
        assert abs(thermo.quartic_x(p, q, y) - x) <= 1e-12 * max(1, xc)


@settings(max_examples=25, deadline=None)
@given(st.fractions(min_value=Fraction(1, 4), max_value=3, max_denominator=8))
def test_f2_continuous_at_transitions(r):
    with mpmath.workdps(thermo.DPS):
        g = thermo.GeometrySquare(r, 0)
        xc = thermo.critical_x(g)
        a = thermo.f2_branch(g, xc, thermo.Regime.I)
        b = thermo.f2_branch(g, xc, thermo.Regime.II)
        assert abs(a - b) < 1e-25
        lo = 1 / xc
        assert abs(thermo.f2_branch(g, lo, thermo.Regime.II) - thermo.f2_branch(g, lo, thermo.Regime.III)) < 1e-25


@settings(max_examples=25, deadline=None)
@given(specs(5), positive_x)
def test_cli_rationals_round_trip(spec, x):
    out = io.StringIO()
    code = run(["exact", "--N", str(spec.N), "--M", str(spec.M), "--L", str(spec.L),
                "--x", f"{x.numerator}/{x.denominator}"], out=out)
    assert code == 0
    rec = json.loads(out.getvalue())
    assert Fraction(rec["value"]) == P_via_pnew(spec, x)
    assert Fraction(rec["x"]) == x
