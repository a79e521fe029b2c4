from fractions import Fraction

import pytest

from fivevertex.polynomial import (
    ExactPolynomial,
    as_fraction,
    fraction_str,
    padd,
    pdivmod_exact,
    pderiv,
    peval,
    pmul,
    ppow,
    ptaylor_shift,
    series_div,
)


def test_as_fraction():
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(2) == Fraction(2)
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert fraction_str(Fraction(5, 4)) == "5/4"
    assert fraction_str(3) == "3/1"


def test_list_helpers():
    assert padd([1, 2], [0, 0, 3]) == [1, 2, 3]
    assert pmul([1, 1], [1, -1]) == [1, 0, -1]
    assert ppow([1, 1], 3) == [1, 3, 3, 1]
    assert pderiv([5, 3, 2]) == [3, 4]
    assert peval([1, 2, 3], Fraction(1, 2)) == Fraction(11, 4)
    # p(x + 1) for p = x^2
    assert ptaylor_shift([0, 0, 1], 1) == [1, 2, 1]
    assert pdivmod_exact([-1, 0, 1], [-1, 1]) == [1, 1]
    # 1 / (1 - x) = 1 + x + x^2 + ...
    assert series_div([1], [1, -1], 4) == [1, 1, 1, 1]


def test_exact_polynomial_basics():
    p = ExactPolynomial([1, Fraction(1, 2)])
    assert p.degree == 1 and p.low == 0
    assert p(2) == 2
    assert p.format() == "1 + 1/2*u"
    assert p.to_json() == {"0": "1/1", "1": "1/2"}
    q = ExactPolynomial.from_dict({-2: 3})
    assert q.low == -2 and q(Fraction(1, 2)) == 12
    assert (p * p).coefficients() == [1, 1, Fraction(1, 4)]
    assert p - p == ExactPolynomial()
    assert ExactPolynomial().is_zero() and ExactPolynomial().format() == "0"
    assert p == ExactPolynomial([1, Fraction(1, 2), 0])
    assert hash(p) == hash(ExactPolynomial([1, Fraction(1, 2)]))


def test_derivatives():
    p = ExactPolynomial([1, 2, 3])  # 1 + 2u + 3u^2, u = 1/x
    assert p.derivative() == ExactPolynomial([2, 6])
    # d/dx = -u^2 d/du
    assert p.d_dx() == ExactPolynomial.from_dict({2: -2, 3: -6})
    assert p.x_theta() == ExactPolynomial([0, -2, -6])
