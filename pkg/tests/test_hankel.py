import math
from fractions import Fraction

import pytest

from fivevertex.hankel import (
    MAX_DETERMINANT_SIZE,
    DomainError,
    P_at_one,
    P_exact_polynomial,
    P_series_at,
    P_via_pnew,
    P_via_zhom1,
    P_via_zhom2,
    euler_hankel_det,
    hankel_determinant_exact,
    hankel_matrix,
    hypergeometric_2F1_terminating,
    leading_constant_at_zero,
    normalized_series,
    pnew_moments,
    pochhammer,
)
from fivevertex.model import LatticeSpec, brute_force_P, brute_force_tilde_Z
from fivevertex.polynomial import ExactPolynomial


def test_pochhammer():
    assert pochhammer(7, 0) == 1
    assert pochhammer(-1, 2) == 0
    assert pochhammer(Fraction(1, 2), 3) == Fraction(15, 8)
    with pytest.raises(DomainError):
        pochhammer(1, -1)


def test_hypergeometric():
    b, c = Fraction(3), Fraction(5)
    assert hypergeometric_2F1_terminating(-1, b, c) == ExactPolynomial([1, -b / c])
    f = hypergeometric_2F1_terminating(-1, -1, 2)
    assert f(Fraction(1, 7)) == 1 + Fraction(1, 14)
    assert hypergeometric_2F1_terminating(0, b, c) == ExactPolynomial.constant(1)
    with pytest.raises(DomainError):
        hypergeometric_2F1_terminating(Fraction(1, 2), 2, 3)


def test_determinants():
    assert hankel_determinant_exact([[1, 2], [3, 4]]) == -2
    assert hankel_determinant_exact([[1]]) == 1
    assert hankel_determinant_exact([[Fraction(1, 2), 1], [1, 3]]) == Fraction(1, 2)
    assert hankel_determinant_exact([[0, 1], [1, 0]]) == -1
    assert hankel_determinant_exact([[1, 2], [2, 4]]) == 0


def test_moment_determinant_matches_oracle():
    # (2,4,5) at x = 2 built by hand from the moment sequence
    spec = LatticeSpec(2, 4, 5)
    x = Fraction(2)
    mu = pnew_moments(spec)
    H = hankel_matrix(mu, range(len(mu)), 2, 1 / x)
    det = hankel_determinant_exact(H)
    assert det != 0
    want = brute_force_tilde_Z(spec)(1 / x) / math.comb(4, 2)
    assert P_via_pnew(spec, x) == want


@pytest.mark.parametrize("route", [P_via_pnew, P_via_zhom1, P_via_zhom2])
def test_routes_small(route):
    s = LatticeSpec(1, 2, 3)
    assert route(s, 2) == Fraction(5, 4)
    assert route(s, 3) == Fraction(7, 6)
    assert route(s, Fraction(1, 2)) == 2
    for x in (2, Fraction(7, 5)):
        assert route(LatticeSpec(1, 1, 2), x) == 1
    spec = LatticeSpec(2, 4, 5)
    assert route(spec, Fraction(7, 5)) == brute_force_P(spec)(Fraction(5, 7))


def test_route_domains():
    s = LatticeSpec(1, 2, 3)
    with pytest.raises(DomainError):
        P_via_zhom1(s, 1)
    for route in (P_via_pnew, P_via_zhom1, P_via_zhom2):
        with pytest.raises(DomainError):
            route(s, 0)
    assert P_via_pnew(s, 1) == P_at_one(s) == P_via_zhom2(s, 1)
    big = LatticeSpec(MAX_DETERMINANT_SIZE + 1, MAX_DETERMINANT_SIZE + 3, MAX_DETERMINANT_SIZE + 3)
    with pytest.raises(DomainError):
        P_via_pnew(big, 2)


def test_exact_polynomial():
    assert P_exact_polynomial(LatticeSpec(1, 2, 3)) == ExactPolynomial([1, Fraction(1, 2)])
    assert P_exact_polynomial(LatticeSpec(1, 1, 2)) == ExactPolynomial.constant(1)
    P = P_exact_polynomial(LatticeSpec(2, 4, 5))
    assert P.degree == 4 == LatticeSpec(2, 4, 5).degree
    assert P == brute_force_P(LatticeSpec(2, 4, 5))


def test_value_at_one():
    assert P_at_one(LatticeSpec(1, 2, 3)) == Fraction(3, 2)
    assert P_at_one(LatticeSpec(0, 4, 3)) == 1
    assert P_at_one(LatticeSpec(2, 4, 5)) == Fraction(25, 3)


def test_leading_constant():
    assert leading_constant_at_zero(LatticeSpec(1, 2, 3)) == Fraction(1, 2)
    with pytest.raises(DomainError):
        leading_constant_at_zero(LatticeSpec(1, 2, 5))


def test_series():
    s = LatticeSpec(1, 2, 3)
    assert P_series_at(s, "infinity", 2)["coeffs"] == [1, Fraction(1, 2)]
    one = P_series_at(s, "one", 2)["coeffs"]
    assert one == [Fraction(3, 2), Fraction(-1, 2)]
    C, ks = normalized_series(s, "one", 2)
    assert C == Fraction(3, 2) and ks[1] == Fraction(-1, 3)
    zero = P_series_at(s, "zero", 1)
    assert zero["exponent"] == -1 and zero["coeffs"] == [Fraction(1, 2)]
    with pytest.raises(ValueError):
        P_series_at(s, "two", 2)


def test_euler_hankel_det():
    # 1x1: f itself; 2x2 for f = 1 + x: f * theta^2 f - (theta f)^2 = (1 + x) x - x^2 = x
    f = {0: Fraction(1), 1: Fraction(1)}
    assert euler_hankel_det(f, 1, 3) == 4
    assert euler_hankel_det(f, 2, 3) == 3
