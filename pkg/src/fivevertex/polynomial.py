"""Exact univariate polynomials with rational coefficients.

Two layers live here.  ``ExactPolynomial`` is the public, immutable type used
for P(u) with u = 1/x (Laurent support allowed through a degree offset).  The
underscore-free list helpers (``padd``, ``pmul`` ...) operate on plain
ascending coefficient lists and are what the rational-function code in
:mod:`fivevertex.painleve` is built on.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Rational = Fraction
Coeffs = list  # ascending list of Fraction


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and "num/den" strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not accepted on exact paths; pass a Fraction or 'num/den'")
    return Fraction(value)


def fraction_str(value: Fraction) -> str:
    value = as_fraction(value)
    return f"{value.numerator}/{value.denominator}"


# -- list helpers -------------------------------------------------------------

def ptrim(a: Sequence) -> Coeffs:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def padd(a: Sequence, b: Sequence) -> Coeffs:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return ptrim(out)


def psub(a: Sequence, b: Sequence) -> Coeffs:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] -= v
    return ptrim(out)


def pscale(a: Sequence, c) -> Coeffs:
    if c == 0:
        return []
    return [c * v for v in a]


def pmul(a: Sequence, b: Sequence) -> Coeffs:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return ptrim(out)


def ppow(a: Sequence, n: int) -> Coeffs:
    if n < 0:
        raise ValueError("negative power of a polynomial")
    result: Coeffs = [1]
    base = list(a)
    while n:
        if n & 1:
            result = pmul(result, base)
        n >>= 1
        if n:
            base = pmul(base, base)
    return result


def pderiv(a: Sequence) -> Coeffs:
    return ptrim([k * a[k] for k in range(1, len(a))])


def peval(a: Sequence, x):
    acc = 0
    for v in reversed(a):
        acc = acc * x + v
    return acc


def ptaylor_shift(a: Sequence, s) -> Coeffs:
    """Coefficients of a(t + s) in t (repeated synthetic division)."""
    out = list(a)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += s * out[j + 1]
    return ptrim(out)


def pcompose_linear(a: Sequence, c0, c1) -> Coeffs:
    """Coefficients of a(c0 + c1*t) in t."""
    result: Coeffs = []
    lin = [c0, c1]
    for v in reversed(a):
        result = padd(pmul(result, lin), [v])
    return result


def series_div(num: Sequence, den: Sequence, order: int) -> Coeffs:
    """First ``order`` power-series coefficients of num/den; den[0] must be nonzero."""
    if not den or den[0] == 0:
        raise ZeroDivisionError("series division needs a nonzero constant term")
    d0 = Fraction(den[0])
    out: Coeffs = []
    for k in range(order):
        acc = Fraction(num[k]) if k < len(num) else Fraction(0)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / d0)
    return out


def pdivmod_exact(a: Sequence, b: Sequence) -> Coeffs:
    """Exact quotient a / b for polynomials over Z or Q; raises if not divisible."""
    a = ptrim(a)
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return []
    if len(a) < len(b):
        raise ArithmeticError("inexact polynomial division")
    q = [0] * (len(a) - len(b) + 1)
    r = list(a)
    lead = b[-1]
    for k in range(len(q) - 1, -1, -1):
        top = r[k + len(b) - 1]
        if top == 0:
            continue
        if isinstance(top, int) and isinstance(lead, int):
            c, rem = divmod(top, lead)
            if rem:
                raise ArithmeticError("inexact polynomial division")
        else:
            c = Fraction(top) / lead
        q[k] = c
        for j, bj in enumerate(b):
            r[k + j] -= c * bj
    if any(v != 0 for v in r):
        raise ArithmeticError("inexact polynomial division")
    return ptrim(q)


class IntPoly:
    """Integer-coefficient polynomial supporting the ring operations Bareiss needs."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable[int]):
        self.c = ptrim(coeffs)

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly(pmul(self.c, other.c))

    def __sub__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly(psub(self.c, other.c))

    def __neg__(self) -> "IntPoly":
        return IntPoly([-v for v in self.c])

    def __floordiv__(self, other: "IntPoly") -> "IntPoly":
        return IntPoly(pdivmod_exact(self.c, other.c))

    def __bool__(self) -> bool:
        return bool(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPoly):
            return self.c == other.c
        if other == 0:
            return not self.c
        return NotImplemented

    def __repr__(self) -> str:
        return f"IntPoly({self.c})"


# -- public polynomial type ---------------------------------------------------

class ExactPolynomial:
    """Finitely supported Laurent polynomial with Fraction coefficients.

    ``coefficients[k]`` multiplies ``var**(low + k)``.  By convention the
    variable is u = 1/x wherever P_{N,M,L} is concerned.
    """

    __slots__ = ("_c", "_low")

    def __init__(self, coefficients: Iterable = (), low: int = 0):
        c = [as_fraction(v) for v in coefficients]
        while c and c[-1] == 0:
            c.pop()
        start = 0
        while start < len(c) and c[start] == 0:
            start += 1
        self._c: tuple[Fraction, ...] = tuple(c[start:])
        self._low = low + start if self._c else 0

    @classmethod
    def from_dict(cls, mapping: Mapping[int, object]) -> "ExactPolynomial":
        items = {int(k): as_fraction(v) for k, v in mapping.items() if as_fraction(v) != 0}
        if not items:
            return cls()
        lo, hi = min(items), max(items)
        return cls([items.get(k, 0) for k in range(lo, hi + 1)], low=lo)

    @classmethod
    def constant(cls, value) -> "ExactPolynomial":
        return cls([value])

    # structure
    @property
    def low(self) -> int:
        return self._low

    @property
    def degree(self) -> int:
        if not self._c:
            return -1
        return self._low + len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    def coefficient(self, k: int) -> Fraction:
        i = k - self._low
        if 0 <= i < len(self._c):
            return self._c[i]
        return Fraction(0)

    def to_dict(self) -> dict[int, Fraction]:
        return {self._low + i: v for i, v in enumerate(self._c) if v != 0}

    def coefficients(self) -> list[Fraction]:
        """Ascending coefficients from degree 0; requires no negative powers."""
        if self._c and self._low < 0:
            raise ValueError("polynomial has negative powers")
        return [Fraction(0)] * self._low + list(self._c)

    # arithmetic
    def _aligned(self, other: "ExactPolynomial"):
        if not isinstance(other, ExactPolynomial):
            other = ExactPolynomial.constant(other)
        if self.is_zero():
            return [], list(other._c), other._low
        if other.is_zero():
            return list(self._c), [], self._low
        lo = min(self._low, other._low)
        a = [Fraction(0)] * (self._low - lo) + list(self._c)
        b = [Fraction(0)] * (other._low - lo) + list(other._c)
        return a, b, lo

    def __add__(self, other) -> "ExactPolynomial":
        a, b, lo = self._aligned(other)
        return ExactPolynomial(padd(a, b), lo)

    __radd__ = __add__

    def __sub__(self, other) -> "ExactPolynomial":
        a, b, lo = self._aligned(other)
        return ExactPolynomial(psub(a, b), lo)

    def __rsub__(self, other) -> "ExactPolynomial":
        return (-self) + other

    def __neg__(self) -> "ExactPolynomial":
        return ExactPolynomial([-v for v in self._c], self._low)

    def __mul__(self, other) -> "ExactPolynomial":
        if not isinstance(other, ExactPolynomial):
            return ExactPolynomial(pscale(self._c, as_fraction(other)), self._low)
        return ExactPolynomial(pmul(self._c, other._c), self._low + other._low)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExactPolynomial":
        other = as_fraction(other)
        return ExactPolynomial([v / other for v in self._c], self._low)

    def __pow__(self, n: int) -> "ExactPolynomial":
        return ExactPolynomial(ppow(self._c, n), self._low * n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactPolynomial):
            try:
                other = ExactPolynomial.constant(as_fraction(other))
            except (TypeError, ValueError):
                return NotImplemented
        return self._c == other._c and self._low == other._low

    def __hash__(self) -> int:
        return hash((self._c, self._low))

    def __call__(self, value):
        value = as_fraction(value) if not isinstance(value, Fraction) else value
        if self.is_zero():
            return Fraction(0)
        acc = peval(self._c, value)
        return acc * value ** self._low if self._low else acc

    def derivative(self) -> "ExactPolynomial":
        """d/dvar, exact on Laurent monomials."""
        return ExactPolynomial.from_dict(
            {k - 1: k * v for k, v in self.to_dict().items() if k != 0}
        )

    def d_dx(self) -> "ExactPolynomial":
        """Derivative in x of a polynomial in u = 1/x, using d/dx = -u^2 d/du."""
        return ExactPolynomial.from_dict(
            {k + 1: -k * v for k, v in self.to_dict().items() if k != 0}
        )

    def x_theta(self) -> "ExactPolynomial":
        """Euler operator x d/dx acting on a polynomial in u = 1/x (u^k -> -k u^k)."""
        return ExactPolynomial.from_dict({k: -k * v for k, v in self.to_dict().items()})

    # presentation
    def __repr__(self) -> str:
        return f"ExactPolynomial({self.to_json()})"

    def to_json(self) -> dict[str, str]:
        return {str(k): fraction_str(v) for k, v in sorted(self.to_dict().items())}

    def format(self, var: str = "u") -> str:
        if self.is_zero():
            return "0"
        parts = []
        for k, v in sorted(self.to_dict().items()):
            coef = str(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
            if k == 0:
                parts.append(coef)
            else:
                mono = var if k == 1 else f"{var}^{k}"
                parts.append(mono if v == 1 else f"{coef}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    __str__ = format
