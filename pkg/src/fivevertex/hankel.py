"""Hankel-determinant representations of P_{N,M,L}(1/x), evaluated exactly.

Three routes are implemented independently:

* ``P_via_pnew``   N x N determinant of hypergeometric moments in 1/x,
* ``P_via_zhom1``  (L-N) x (L-N) determinant built from a polynomial in x,
* ``P_via_zhom2``  N x N determinant built from p(x) (x-1)^(-s).

The Euler operator x d/dx acts on x^k as multiplication by k, so every
entry (x d/dx)^n f of a Laurent polynomial f is sum_k f_k k^n x^k.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .model import LatticeSpec, macmahon_PL
from .polynomial import (
    ExactPolynomial,
    IntPoly,
    as_fraction,
    padd,
    pderiv,
    peval,
    pmul,
    psub,
    pscale,
)

MAX_DETERMINANT_SIZE = 32


class DomainError(ValueError):
    pass


def pochhammer(z, m: int) -> Fraction:
    """Rising factorial z (z+1) ... (z+m-1)."""
    if m < 0:
        raise DomainError("Pochhammer index must be non-negative")
    z = as_fraction(z)
    out = Fraction(1)
    for k in range(m):
        out *= z + k
    return out


def _nonpositive_int(v: Fraction) -> bool:
    return v.denominator == 1 and v <= 0


def hyp2f1_coefficients(a, b, c) -> list[Fraction]:
    """Coefficients of the terminating series 2F1(a, b; c; z) in z."""
    a, b, c = as_fraction(a), as_fraction(b), as_fraction(c)
    stops = [-int(v) for v in (a, b) if _nonpositive_int(v)]
    if not stops:
        raise DomainError("2F1 does not terminate: a or b must be a non-positive integer")
    top = min(stops)
    coeffs = [Fraction(1)]
    term = Fraction(1)
    for m in range(top):
        if c + m == 0:
            raise DomainError("zero denominator in 2F1 before termination")
        term = term * (a + m) * (b + m) / ((c + m) * (m + 1))
        coeffs.append(term)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def hypergeometric_2F1_terminating(a, b, c, var: str = "z") -> ExactPolynomial:
    """The terminating 2F1 as an exact polynomial in its argument.

    ``var`` is a label only; the polynomial is always in the series variable.
    """
    return ExactPolynomial(hyp2f1_coefficients(a, b, c))


# -- determinants ----------------------------------------------------------------

def bareiss_determinant(matrix: Sequence[Sequence]) -> object:
    """Fraction-free elimination over an integral domain (ints or IntPoly).

    Every division ``//`` is exact by Sylvester's identity.
    """
    A = [list(row) for row in matrix]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = None
    for k in range(n - 1):
        if not A[k][k]:
            swap = next((r for r in range(k + 1, n) if A[r][k]), None)
            if swap is None:
                return IntPoly([]) if isinstance(A[0][0], IntPoly) else 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        piv = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                v = row_i[j] * piv - aik * row_k[j]
                row_i[j] = v if prev is None else v // prev
        prev = piv
    det = A[n - 1][n - 1]
    return det if sign > 0 else -det


def hankel_determinant_exact(H: Sequence[Sequence]) -> Fraction:
    """Exact determinant of a rational matrix; rows are scaled to integers first."""
    n = len(H)
    if n == 0:
        return Fraction(1)
    scale = Fraction(1)
    rows = []
    for row in H:
        row = [as_fraction(v) for v in row]
        d = math.lcm(*(v.denominator for v in row))
        rows.append([int(v * d) for v in row])
        scale /= d
    return Fraction(bareiss_determinant(rows)) * scale


def hankel_matrix(moments: Sequence[Fraction], support: Sequence[int], n: int,
                  point: Fraction) -> list[list[Fraction]]:
    """H_ij = sum_m mu(m) m^(i+j) point^m for 0 <= i, j < n (0^0 = 1)."""
    weights = [as_fraction(mu) * point ** m for mu, m in zip(moments, support)]
    sums = []
    for k in range(2 * n - 1):
        sums.append(sum((w * (m ** k if k else 1) for w, m in zip(weights, support)), Fraction(0)))
    return [[sums[i + j] for j in range(n)] for i in range(n)]


# -- the moment sequence -----------------------------------------------------------

def pnew_moments(spec: LatticeSpec) -> list[Fraction]:
    """mu(m) = (-L+2)_m (-M+1)_m / ((m+1)! m!), m = 0..min(L-2, M-1)."""
    _, M, L = spec.as_tuple()
    top = min(L - 2, M - 1)
    out = []
    for m in range(top + 1):
        out.append(pochhammer(2 - L, m) * pochhammer(1 - M, m)
                   / (math.factorial(m + 1) * math.factorial(m)))
    return out


def _pnew_prefactor(spec: LatticeSpec) -> Fraction:
    N, M, L = spec.as_tuple()
    out = Fraction(math.factorial(N))
    for j in range(N):
        out *= Fraction(math.factorial(L - N - 1 + j) * math.factorial(M - N + j),
                        math.factorial(L - 2) * math.factorial(M - 1))
    return out


def _check_size(n: int) -> None:
    if n > MAX_DETERMINANT_SIZE:
        raise DomainError(f"determinant size {n} exceeds cap {MAX_DETERMINANT_SIZE}")


def _trivial(spec: LatticeSpec) -> bool:
    return spec.N == 0 or spec.L == spec.N


def P_via_pnew(spec: LatticeSpec, x) -> Fraction:
    x = as_fraction(x)
    if x == 0:
        raise DomainError("x = 0 is a pole; use the leading-term formula")
    if _trivial(spec):
        return Fraction(1)
    N = spec.N
    _check_size(N)
    mu = pnew_moments(spec)
    H = hankel_matrix(mu, range(len(mu)), N, 1 / x)
    return _pnew_prefactor(spec) * x ** (N * (N - 1) // 2) * hankel_determinant_exact(H)


def zhom1_inner(spec: LatticeSpec) -> list[Fraction]:
    """Coefficients in x of (x-1)^(M+L-2N-1) 2F1(-N, L-N-1; -M; x)."""
    N, M, L = spec.as_tuple()
    f = hyp2f1_coefficients(-N, L - N - 1, -M)
    e = M + L - 2 * N - 1
    binom = [Fraction(math.comb(e, k) * (-1) ** (e - k)) for k in range(e + 1)]
    return pmul(binom, f)


def P_via_zhom1(spec: LatticeSpec, x) -> Fraction:
    x = as_fraction(x)
    if x == 1:
        raise DomainError("x = 1 is a pole of this representation; use P_at_one")
    if x == 0:
        raise DomainError("x = 0 is a pole; use the leading-term formula")
    if _trivial(spec):
        return Fraction(1)
    N, M, L = spec.as_tuple()
    n = L - N
    _check_size(n)
    f = zhom1_inner(spec)
    H = hankel_matrix(f, range(len(f)), n, x)
    pref = Fraction((-1) ** (n * (n - 1) // 2))
    for j in range(n):
        pref *= Fraction(math.factorial(M) * math.factorial(M + j),
                         math.factorial(M - N) * math.factorial(M + L - N - 1) * math.factorial(N + j))
    pref /= (x - 1) ** (n * (M - N)) * x ** ((L + N) * (L - N - 1) // 2)
    # the printed normalization yields binomial(M, N) P
    return pref * hankel_determinant_exact(H) / math.comb(M, N)


def zhom2_numerators(spec: LatticeSpec, count: int) -> list[list[Fraction]]:
    """p_k with (x d/dx)^k [h (x-1)^(-s)] = p_k (x-1)^(-s-k), k < count."""
    N, M, L = spec.as_tuple()
    s = M + L - 2 * N + 1
    h1 = hyp2f1_coefficients(N + 1 - L, N - L, 2 * N - L - M)
    # h(x) = sum_m h1[m] (1 - x)^m
    h: list[Fraction] = []
    one_minus_x = [Fraction(1), Fraction(-1)]
    power = [Fraction(1)]
    for c in h1:
        h = padd(h, pscale(power, c))
        power = pmul(power, one_minus_x)
    out = [h]
    p, e = h, s
    xm1 = [Fraction(-1), Fraction(1)]
    for _ in range(1, count):
        # x p' (x-1) - e x p
        t1 = pmul([Fraction(0), Fraction(1)], pmul(pderiv(p), xm1))
        t2 = pscale(pmul([Fraction(0), Fraction(1)], p), e)
        p = psub(t1, t2)
        e += 1
        out.append(p)
    return out


def P_via_zhom2(spec: LatticeSpec, x) -> Fraction:
    x = as_fraction(x)
    if x == 0:
        raise DomainError("x = 0 is a pole; use the leading-term formula")
    if _trivial(spec):
        return Fraction(1)
    N, M, L = spec.as_tuple()
    _check_size(N)
    ps = zhom2_numerators(spec, 2 * N - 1)
    vals = [peval(p, x) for p in ps]
    H = [[vals[i + j] for j in range(N)] for i in range(N)]
    pref = Fraction(1)
    for j in range(N):
        pref *= Fraction(math.factorial(L + M - 2 * N),
                         math.factorial(L - N + j) * math.factorial(M - N + j))
    # the (x-1) powers cancel exactly: N(M+L-N) - N s - N(N-1) = 0
    pref /= x ** (N * (L - 1) - N * (N + 1) // 2)
    return pref * hankel_determinant_exact(H) / math.comb(M, N)


# -- symbolic polynomial -------------------------------------------------------------

def P_exact_polynomial(spec: LatticeSpec) -> ExactPolynomial:
    """P as a polynomial in u = 1/x, from the moment determinant over Z[u]."""
    if _trivial(spec):
        return ExactPolynomial.constant(1)
    N = spec.N
    _check_size(N)
    mu = pnew_moments(spec)
    D = math.lcm(*(m.denominator for m in mu))
    imu = [int(m * D) for m in mu]
    sums = []
    for k in range(2 * N - 1):
        sums.append(IntPoly([c * (m ** k if k else 1) for m, c in enumerate(imu)]))
    H = [[sums[i + j] for j in range(N)] for i in range(N)]
    det = bareiss_determinant(H)
    coeffs = det.c if isinstance(det, IntPoly) else [det]
    shift = N * (N - 1) // 2
    if any(coeffs[:shift]):
        raise ArithmeticError("moment determinant has unexpected low-order terms")
    scale = _pnew_prefactor(spec) / Fraction(D) ** N
    return ExactPolynomial([Fraction(c) * scale for c in coeffs[shift:]])


def P_at_one(spec: LatticeSpec) -> Fraction:
    N, M, L = spec.as_tuple()
    return Fraction(macmahon_PL(N, L - N, M - N), math.comb(M, N))


def leading_constant_at_zero(spec: LatticeSpec) -> Fraction:
    """lim x^{deg} P(1/x) for L <= M + 1."""
    N, M, L = spec.as_tuple()
    if L > M + 1:
        raise DomainError("closed form needs L <= M + 1")
    return Fraction(macmahon_PL(N, M - L + 1, L - N), math.comb(M, N))


def P_series_at(spec: LatticeSpec, point: str, order: int,
                P: ExactPolynomial | None = None) -> dict:
    """Leading expansion data of P(1/x) at x = infinity, 0 or 1.

    Returns ``{"exponent": e, "coeffs": [...]}`` meaning
    P = var^e (c0 + c1 var + ...), var = 1/x, x or x - 1 respectively.
    """
    if P is None:
        P = P_exact_polynomial(spec)
    c = P.coefficients()
    if point == "infinity":
        return {"exponent": 0, "coeffs": (c + [Fraction(0)] * order)[:order]}
    if point == "zero":
        d = len(c) - 1
        rev = list(reversed(c))
        return {"exponent": -d, "coeffs": (rev + [Fraction(0)] * order)[:order]}
    if point == "one":
        # x^{-j} = (1 + t)^{-j} = sum_n binom(-j, n) t^n
        out = [Fraction(0)] * order
        for j, cj in enumerate(c):
            if cj == 0:
                continue
            b = Fraction(1)
            for n in range(order):
                out[n] += cj * b
                b = b * (-j - n) / (n + 1)
        return {"exponent": 0, "coeffs": out}
    raise ValueError(f"unknown expansion point {point!r}")


def normalized_series(spec: LatticeSpec, point: str, order: int = 3,
                      P: ExactPolynomial | None = None) -> tuple[Fraction, list[Fraction]]:
    """(C, [1, kappa_1, kappa_2, ...]) with P = var^e C (1 + kappa_1 var + ...)."""
    data = P_series_at(spec, point, order, P)
    coeffs = data["coeffs"]
    C = coeffs[0]
    return C, [v / C for v in coeffs]


def euler_hankel_det(f: dict[int, Fraction], n: int, x) -> Fraction:
    """det[(x d/dx)^(i+j) f] at x for a Laurent polynomial f given as {k: f_k}."""
    support = sorted(f)
    H = hankel_matrix([f[k] for k in support], support, n, as_fraction(x))
    return hankel_determinant_exact(H)
