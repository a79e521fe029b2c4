"""Large-N expansions of log P(1/x) for square and rectangular domains.

Everything is evaluated with mpmath at ``DPS`` significant digits.  Square
geometries are described by (r, eps) with r N = (M+L)/2 - N and eps = M-L+1;
rectangular ones by (p, q) with p N = M - N + 1/2 and q N = L - N - 1/2.

Regimes: I for x >= xc, II in between, III for x <= 1/xc (square only).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Callable, Iterable, Optional, Union

import mpmath
from mpmath import mpf

from .hankel import DomainError, P_at_one, P_via_pnew
from .model import LatticeSpec
from .polynomial import as_fraction

DPS = 40

Real = Union[int, Fraction, str, mpf]


def _mp(value) -> mpf:
    if isinstance(value, mpf):
        return value
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, str) and "/" in value:
        fr = Fraction(value)
        return mpf(fr.numerator) / fr.denominator
    return mpf(value)


def zeta_prime_minus_one() -> mpf:
    return mpmath.zeta(-1, derivative=1)


def log_sqrt_2pi() -> mpf:
    return mpmath.log(2 * mpmath.pi) / 2


# -- Barnes G ---------------------------------------------------------------

def log_barnes_G_exact(n: int) -> mpf:
    """log G(n) for a positive integer n, from G(n+2) = 1! 2! ... n!."""
    if not isinstance(n, int) or n < 1:
        raise DomainError("exact Barnes G needs a positive integer")
    total = mpf(0)
    for k in range(1, n - 1):
        total += mpmath.loggamma(k + 1)
    return total


def barnes_G_int(n: int) -> int:
    """G(n) as an exact integer."""
    if n < 1:
        raise DomainError("exact Barnes G needs a positive integer")
    out = 1
    for k in range(1, n - 1):
        out *= math.factorial(k)
    return out


def log_barnes_G_asymptotic(arg: Real) -> mpf:
    """Large-argument form of log G(arg), written in z = arg - 1."""
    z = _mp(arg) - 1
    if z + 1 < 20:
        raise DomainError("asymptotic Barnes G is only offered for arguments >= 20")
    return (z * z / 2 * mpmath.log(z) - 3 * z * z / 4 + mpmath.log(2 * mpmath.pi) / 2 * z
            - mpmath.log(z) / 12 + zeta_prime_minus_one())


def log_barnes_G(arg: Real, method: str = "auto") -> mpf:
    if method == "exact" or (method == "auto" and isinstance(arg, int)):
        return log_barnes_G_exact(int(arg))
    if method in ("auto", "asymptotic"):
        return log_barnes_G_asymptotic(arg)
    raise ValueError(f"unknown method {method!r}")


# -- geometry ---------------------------------------------------------------

class Regime(str, Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class GeometrySquare:
    r: Fraction
    eps: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r", as_fraction(self.r))
        if self.r <= 0:
            raise DomainError("r must be positive")
        if int(self.eps) != self.eps:
            raise DomainError("eps must be an integer")

    @classmethod
    def from_spec(cls, spec: LatticeSpec) -> "GeometrySquare":
        N, M, L = spec.as_tuple()
        if N == 0:
            raise DomainError("geometry needs N >= 1")
        return cls(Fraction(M + L - 2 * N, 2 * N), M - L + 1)

    @property
    def w(self) -> Fraction:
        return self.r + Fraction(1, 2)

    def to_json(self) -> dict:
        return {"kind": "square", "r": str(self.r), "eps": self.eps}


@dataclass(frozen=True)
class GeometryRect:
    p: Fraction
    q: Fraction

    def __post_init__(self):
        object.__setattr__(self, "p", as_fraction(self.p))
        object.__setattr__(self, "q", as_fraction(self.q))
        if self.p <= 0 or self.q <= 0:
            raise DomainError("p and q must be positive")

    @classmethod
    def from_spec(cls, spec: LatticeSpec) -> "GeometryRect":
        N, M, L = spec.as_tuple()
        if N == 0:
            raise DomainError("geometry needs N >= 1")
        return cls(Fraction(2 * (M - N) + 1, 2 * N), Fraction(2 * (L - N) - 1, 2 * N))

    @property
    def v(self) -> Fraction:
        return self.p + Fraction(1, 2)

    @property
    def u(self) -> Fraction:
        return self.q + Fraction(1, 2)

    def to_json(self) -> dict:
        return {"kind": "rect", "p": str(self.p), "q": str(self.q)}


Geometry = Union[GeometrySquare, GeometryRect]


def critical_x(geometry: Geometry) -> mpf:
    if isinstance(geometry, GeometrySquare):
        return (2 * _mp(geometry.r) + 1) ** 2
    p, q = _mp(geometry.p), _mp(geometry.q)
    return (mpmath.sqrt((p + 1) * (q + 1)) + mpmath.sqrt(p * q)) ** 2


def classify_regime(geometry: Geometry, x: Real) -> tuple[Regime, ...]:
    """Regimes whose formulas apply at x; two of them at a boundary point."""
    x = _mp(x)
    if x < 0:
        raise DomainError("x must be non-negative")
    xc = critical_x(geometry)
    tol = mpmath.mpf(10) ** (-(mpmath.mp.dps - 5)) * max(1, xc)
    if abs(x - xc) <= tol:
        return (Regime.I, Regime.II)
    if x > xc:
        return (Regime.I,)
    if isinstance(geometry, GeometryRect):
        return (Regime.II,)
    if abs(x - 1 / xc) <= tol:
        return (Regime.II, Regime.III)
    return (Regime.II,) if x > 1 / xc else (Regime.III,)


# -- expansions -------------------------------------------------------------

@dataclass
class AsymptoticExpansion:
    regime: Regime
    f2: mpf
    f1: mpf
    f0: mpf
    logN_coeff: mpf
    F1: mpf
    F0: mpf
    kappa: mpf
    boundary_divergence: bool = False

    @property
    def F2(self) -> mpf:
        return self.f2

    def log_P(self, N: int) -> mpf:
        """N^2 f2 + N f1 + logN_coeff log N + f0."""
        return N * N * self.f2 + N * self.f1 + self.logN_coeff * mpmath.log(N) + self.f0

    def log_wtZ(self, N: int) -> mpf:
        return N * N * self.F2 + N * self.F1 + self.kappa * mpmath.log(N) + self.F0

    def to_json(self, digits: int = 20) -> dict:
        def enc(v):
            return mpmath.nstr(v, digits)
        return {
            "regime": self.regime.value,
            "f2": enc(self.f2), "f1": enc(self.f1), "f0": enc(self.f0),
            "logN_coeff": enc(self.logN_coeff),
            "F1": enc(self.F1), "F0": enc(self.F0), "kappa": enc(self.kappa),
            "boundary_divergence": self.boundary_divergence,
        }


def _safe_log(arg: mpf) -> tuple[mpf, bool]:
    if arg == 0:
        return mpmath.inf, True
    return mpmath.log(arg), False


def _pick(geometry: Geometry, x: mpf, regime: Optional[Regime | str]) -> Regime:
    allowed = classify_regime(geometry, x)
    if regime is None:
        return allowed[0]
    regime = Regime(regime)
    if regime not in allowed:
        raise DomainError(f"x = {mpmath.nstr(x, 12)} is outside regime {regime.value}")
    return regime


def _is_infinite(x) -> bool:
    return isinstance(x, mpf) and mpmath.isinf(x)


def f2_square(r: Real, x: Real, regime: Regime | str) -> mpf:
    """One closed form of f2 (no domain check, usable past the boundary)."""
    r, x = _mp(r), _mp(x)
    xc = (2 * r + 1) ** 2
    regime = Regime(regime)
    if regime is Regime.I:
        return r * r * mpmath.log(x / (x - 1))
    if regime is Regime.II:
        return ((2 * r + 1) * mpmath.log((1 + mpmath.sqrt(x)) / (1 + mpmath.sqrt(xc)))
                - (r + mpf(1) / 4) * mpmath.log(x / xc) + r * r * mpmath.log(xc / (xc - 1)))
    return -r * r * mpmath.log(1 - x) - r * mpmath.log(x)


def f_terms_square(r: Real, eps: int, x: Real, regime: Optional[Regime | str] = None) -> AsymptoticExpansion:
    geometry = GeometrySquare(as_fraction(r) if not isinstance(r, mpf) else Fraction(str(r)), eps)
    r = _mp(geometry.r)
    eps = int(eps)
    ae = abs(eps)
    if _is_infinite(_mp(x)):
        ls = log_sqrt_2pi()
        zero = mpf(0)
        F1 = (r + 1) * mpmath.log(r + 1) - r * mpmath.log(r)
        return AsymptoticExpansion(Regime.I, zero, zero, zero, zero, F1,
                                   -ls - mpf(eps) / 2 * mpmath.log(r / (r + 1)), mpf(-1) / 2)
    x = _mp(x)
    reg = _pick(geometry, x, regime)
    sxc = 2 * r + 1
    xc = sxc * sxc
    sx = mpmath.sqrt(x)
    f2 = f2_square(r, x, reg)
    diverges = False
    if reg is Regime.I:
        f1 = ((2 * r + 1) * mpmath.log((mpmath.sqrt(xc * (x - 1)) + mpmath.sqrt(x - xc)) / ((1 + sxc) * sx))
              - mpmath.log((mpmath.sqrt(x - 1) + mpmath.sqrt(x - xc)) / (2 * sx)))
        lg, diverges = _safe_log(x - xc)
        f0 = (mpmath.log(x) - lg) / 4 - mpf(eps * eps) / 4 * mpmath.log(x / (x - 1))
        logN = mpf(0)
    elif reg is Regime.II:
        f1 = mpmath.log(2 * sx / (sxc + 1)) + r * mpmath.log((sxc - 1) / (sxc + 1))
        lg, diverges = _safe_log(mpmath.sqrt(xc * x) - 1)
        d2 = False
        lg2, d2 = _safe_log(sxc - sx)
        diverges = diverges or d2
        if diverges:
            f0 = mpmath.inf
        else:
            f0 = ((3 * lg2 + mpmath.log(sx) - lg) / 8
                  - mpmath.log(sxc * (xc - 1)) / 12
                  + mpf(eps * eps) / 2 * (lg - mpmath.log(mpmath.sqrt(xc - 1) * sx))
                  + zeta_prime_minus_one() + log_sqrt_2pi())
        logN = mpf(5) / 12
    else:
        root = mpmath.sqrt(1 - xc * x)
        f1 = (ae * (2 * r + 1) * mpmath.log((sxc * mpmath.sqrt(1 - x) + root) / mpmath.sqrt(xc - 1))
              - ae * mpmath.log((mpmath.sqrt(1 - x) + root) / (mpmath.sqrt(xc - 1) * sx))
              + mpmath.log(2 * sx / (sxc + 1)) + r * mpmath.log((sxc - 1) / (sxc + 1)))
        f0 = mpmath.log(1 - x) / 4 + (1 - ae) * log_sqrt_2pi() + log_barnes_G_exact(1 + ae)
        if eps:
            lg, diverges = _safe_log(1 - xc * x)
            f0 = mpmath.inf if diverges else f0 - mpf(eps * eps) / 4 * lg
        logN = mpf(1 - eps * eps) / 2
    F1 = f1 - mpmath.log(2 / (sxc + 1)) - r * mpmath.log((sxc - 1) / (sxc + 1))
    F0 = f0 - log_sqrt_2pi() - mpf(eps) / 2 * mpmath.log((sxc - 1) / (sxc + 1))
    kappa = logN - mpf(1) / 2
    return AsymptoticExpansion(reg, f2, f1, f0, logN, F1, F0, kappa, diverges)


# -- rectangle: quartic branch ----------------------------------------------

def quartic_x(p: Real, q: Real, y: Real) -> mpf:
    """x(y) on the Regime II branch (reduces to (y+1)^2/(2p+1)^2 when p = q)."""
    p, q, y = _mp(p), _mp(q), _mp(y)
    if p == q:
        return (y + 1) ** 2 / (2 * p + 1) ** 2
    num = (y + 1) ** 2 * (y - p + q) * (y + p - q)
    den = ((2 * p + 1) * y + p - q) * ((2 * q + 1) * y + q - p)
    return num / den


def _y_bisect(p: mpf, q: mpf, x: mpf, lo: mpf, hi: mpf) -> mpf:
    if quartic_x(p, q, lo) >= x:
        return lo
    while quartic_x(p, q, hi) < x:
        hi = 2 * hi + 1
    stop = mpf(2) ** (-mpmath.mp.prec + 4) * max(1, abs(hi))
    for _ in range(4 * mpmath.mp.prec):
        mid = (lo + hi) / 2
        if quartic_x(p, q, mid) < x:
            lo = mid
        else:
            hi = mid
        if hi - lo <= stop:
            break
    return (lo + hi) / 2


def _y_of_x(geometry: GeometryRect, x: mpf) -> mpf:
    """Branch root for any x >= x(|p-q|); past xc the monotone extension is used."""
    p, q = _mp(geometry.p), _mp(geometry.q)
    return _y_bisect(p, q, x, abs(p - q), critical_x(geometry) - 1)


def solve_quartic_branch(p: Real, q: Real, x: Real) -> mpf:
    geometry = GeometryRect(p, q)
    x = _mp(x)
    xc = critical_x(geometry)
    lower = mpf(0) if geometry.p != geometry.q else 1 / xc
    if x < lower or x > xc * (1 + mpf(10) ** (-(mpmath.mp.dps - 5))):
        raise DomainError("x outside the branch interval")
    return _y_of_x(geometry, min(x, xc))


# -- rectangle: expansions --------------------------------------------------

def _f2_rect_II_from_y(p: mpf, q: mpf, y: mpf) -> mpf:
    log = mpmath.log
    out = (-(p + q) ** 2 / 2 * log(y)
           - ((p - q) ** 2 + 2 * p + 2 * q + 1) / 2 * log(y + 1)
           + p * (p + 1) * log((2 * p + 1) * y + p - q)
           + q * (q + 1) * log((2 * q + 1) * y + q - p)
           + (p + q + 1) * log(y + p + q + 2)
           - ((p + 1) ** 2 * log(2 * (p + 1)) + (q + 1) ** 2 * log(2 * (q + 1))
              + p * p * log(2 * p) + q * q * log(2 * q)) / 2)
    # the two linear factors vanish at y = |p - q|; their logs carry weights p and q
    for coeff, arg in ((p, y + p - q), (q, y + q - p)):
        if arg != 0:
            out -= coeff * log(arg)
        else:
            out = mpmath.inf
    return out


def f2_rect(p: Real, q: Real, x: Real, regime: Regime | str) -> mpf:
    p_, q_, x = _mp(p), _mp(q), _mp(x)
    if Regime(regime) is Regime.I:
        return p_ * q_ * mpmath.log(x / (x - 1))
    y = _y_of_x(GeometryRect(p, q), x)
    return _f2_rect_II_from_y(p_, q_, y)


def s_rect(p: Real, q: Real, x: Real) -> mpf:
    p, q, x = _mp(p), _mp(q), _mp(x)
    return x * x - 2 * (2 * p * q + p + q + 1) * x + (p + q + 1) ** 2


def _log_binom_rect_terms(p: mpf) -> tuple[mpf, mpf, mpf]:
    """(N, log N, constant) coefficients of log binomial(M, N) with M = (p+1) N - 1/2."""
    return (p + 1) * mpmath.log(p + 1) - p * mpmath.log(p), mpf(-1) / 2, -log_sqrt_2pi()


def f_terms_rect(p: Real, q: Real, x: Real, regime: Optional[Regime | str] = None) -> AsymptoticExpansion:
    geometry = GeometryRect(p, q)
    p, q = _mp(geometry.p), _mp(geometry.q)
    log = mpmath.log
    b1, bl, b0 = _log_binom_rect_terms(p)
    if _is_infinite(_mp(x)):
        zero = mpf(0)
        return AsymptoticExpansion(Regime.I, zero, zero, zero, zero, b1, b0, bl)
    x = _mp(x)
    reg = _pick(geometry, x, regime)
    diverges = False
    if reg is Regime.I:
        s = s_rect(p, q, x)
        ss = mpmath.sqrt(max(s, 0))
        sq = mpmath.sqrt(x * (x - 1))
        f2 = p * q * log(x / (x - 1))
        f1 = ((2 * p + 1) / 2 * log(((2 * p + 1) * x - p - q - 1 + ss) / (2 * (p + 1) * sq))
              + (2 * q + 1) / 2 * log(((2 * q + 1) * x - p - q - 1 + ss) / (2 * (q + 1) * sq))
              - log((x - 2 * p * q - p - q - 1 + ss) / (2 * x)) / 2)
        ls, diverges = _safe_log(s)
        f0 = mpmath.inf if diverges else (log(x * (x - 1)) - ls) / 4
        logN = mpf(0)
    else:
        y = _y_of_x(geometry, x)
        f2 = _f2_rect_II_from_y(p, q, y)
        f1 = (log(x) / 2 - ((p + 1) * log(p + 1) + (q + 1) * log(q + 1)
                            - p * log(p) - q * log(q)) / 2)
        quad = y * y - 2 * (2 * p * q + p + q) * y + (p - q) ** 2
        cubic = ((2 * p + 1) * (2 * q + 1) * y ** 3
                 - (p - q) ** 2 * (3 * y * y + 3 * y - (p + q + 1) ** 2 + 1))
        # quad < 0 strictly inside the branch, so |quad| is used; the cubic enters with -1/3
        lq, d1 = _safe_log(abs(quad))
        ly, d2 = _safe_log(y)
        diverges = d1 or d2
        if diverges:
            f0 = mpmath.inf
        else:
            f0 = ((ly + log(y + 1) - 2 * log((2 * p + 1) * y + p - q)
                   - 2 * log((2 * q + 1) * y + q - p) + 3 * lq - log(cubic) / 3) / 8
                  - log(16 * p * (p + 1) * q * (q + 1)) / 24
                  + zeta_prime_minus_one() + log_sqrt_2pi())
        logN = mpf(5) / 12
    return AsymptoticExpansion(reg, f2, f1, f0, logN, f1 + b1, f0 + b0, logN + bl, diverges)


def f_terms(geometry: Geometry, x: Real, regime: Optional[Regime | str] = None) -> AsymptoticExpansion:
    if isinstance(geometry, GeometrySquare):
        return f_terms_square(geometry.r, geometry.eps, x, regime)
    return f_terms_rect(geometry.p, geometry.q, x, regime)


def f2_branch(geometry: Geometry, x: Real, regime: Regime | str) -> mpf:
    if isinstance(geometry, GeometrySquare):
        return f2_square(geometry.r, x, regime)
    return f2_rect(geometry.p, geometry.q, x, regime)


def f2(geometry: Geometry, x: Real) -> mpf:
    x = _mp(x)
    return f2_branch(geometry, x, classify_regime(geometry, x)[0])


# -- sigma_2 and derivatives ------------------------------------------------

def B2_tilde(geometry: Geometry) -> mpf:
    if isinstance(geometry, GeometrySquare):
        w = _mp(geometry.w)
        return w * w / 2 - w + mpf(3) / 8
    u, v = _mp(geometry.u), _mp(geometry.v)
    return (v * u - u - v) / 2 + mpf(3) / 8


def _sigma2_rect_II_from_y(u: mpf, v: mpf, y: mpf) -> mpf:
    return (v * u / 2 - (v * v + u * u) / (16 * v * u) - mpf(1) / 4 - y / 2
            + (4 * v * v - 1) * (u * u - v * v) / (16 * v * (2 * v * y + v - u))
            + (4 * u * u - 1) * (v * v - u * u) / (16 * u * (2 * u * y + u - v)))


def sigma2_branch(geometry: Geometry, x: Real, regime: Regime | str) -> mpf:
    x = _mp(x)
    regime = Regime(regime)
    if isinstance(geometry, GeometrySquare):
        w = _mp(geometry.w)
        if regime is Regime.I:
            return -x / 4 - w * w / 2 + mpf(1) / 8
        if regime is Regime.II:
            return -w * mpmath.sqrt(x) + w * w / 2 + mpf(1) / 8
        return -w * w * x + w * w / 2 - mpf(1) / 8
    u, v = _mp(geometry.u), _mp(geometry.v)
    if regime is Regime.I:
        return -x / 4 - u * v / 2 + mpf(1) / 8
    return _sigma2_rect_II_from_y(u, v, _y_of_x(geometry, x))


def sigma2_leading(geometry: Geometry, x: Real) -> mpf:
    x = _mp(x)
    return sigma2_branch(geometry, x, classify_regime(geometry, x)[0])


def _sigma2_prime_branch(geometry: Geometry, x: mpf, regime: Regime) -> mpf:
    if isinstance(geometry, GeometrySquare):
        w = _mp(geometry.w)
        return {Regime.I: mpf(-1) / 4, Regime.II: -w / (2 * mpmath.sqrt(x)),
                Regime.III: -w * w}[regime]
    if regime is Regime.I:
        return mpf(-1) / 4
    u, v = _mp(geometry.u), _mp(geometry.v)
    y = _y_of_x(geometry, x)
    return ((u - v) ** 2 - 4 * u * v * y) / (4 * y * (1 + y))


def f2_prime(geometry: Geometry, x: Real, regime: Regime | str) -> mpf:
    """d f2 / dx of one branch, from the sigma_2 relation (0/0 at x = 1)."""
    x = _mp(x)
    s = sigma2_branch(geometry, x, regime) + x / 4 - B2_tilde(geometry)
    return s / (x * (x - 1))


def f2_second(geometry: Geometry, x: Real, regime: Regime | str) -> mpf:
    x = _mp(x)
    regime = Regime(regime)
    g = x * (x - 1)
    s = sigma2_branch(geometry, x, regime) + x / 4 - B2_tilde(geometry)
    ds = _sigma2_prime_branch(geometry, x, regime) + mpf(1) / 4
    return ds / g - s * (2 * x - 1) / (g * g)


def rho_prime(geometry: Geometry, x: Real) -> mpf:
    """Derivative of f2^II - f2^I in closed form."""
    x = _mp(x)
    if isinstance(geometry, GeometrySquare):
        w = _mp(geometry.w)
        return (mpmath.sqrt(x) - 2 * w) ** 2 / (4 * x * (x - 1))
    u, v = _mp(geometry.u), _mp(geometry.v)
    y = _y_of_x(geometry, x)
    quad = y * y + (1 - 4 * v * u) * y + (v - u) ** 2
    return quad ** 2 / (4 * x * y * y * (y + v + u + 1) * (y - v - u + 1))


# -- third-order transition -------------------------------------------------

@dataclass
class TransitionReport:
    geometry: dict
    point: str
    x_boundary: mpf
    h: mpf
    value_gap: mpf
    d1_mismatch: mpf
    d2_mismatch: mpf
    d3_jump: mpf
    analytic_d1_gap: mpf
    analytic_d2_gap: mpf
    analytic_d3_jump: mpf

    @property
    def passed(self) -> bool:
        worst = max(self.d1_mismatch, self.d2_mismatch)
        return worst < mpf("1e-5") and self.d3_jump > 10 * worst

    def to_json(self) -> dict:
        out = {"geometry": self.geometry, "point": self.point}
        for key in ("x_boundary", "h", "value_gap", "d1_mismatch", "d2_mismatch", "d3_jump",
                    "analytic_d1_gap", "analytic_d2_gap", "analytic_d3_jump"):
            out[key] = mpmath.nstr(getattr(self, key), 12)
        out["pass"] = self.passed
        return out


def _one_sided(f: Callable[[mpf], mpf], x0: mpf, h: mpf, side: int) -> tuple[mpf, mpf, mpf]:
    """Second-order one-sided first/second differences and a third difference."""
    v = [f(x0 + side * k * h) for k in range(5)]
    d1 = side * (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
    d2 = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / (h * h)
    d3 = side * (-5 * v[0] + 18 * v[1] - 24 * v[2] + 14 * v[3] - 3 * v[4]) / (2 * h ** 3)
    return d1, d2, d3


def third_order_scan(geometry: Geometry, h: Real = Fraction(1, 1000), point: str = "upper") -> TransitionReport:
    """Compare one-sided differences of the piecewise f2 on each side of a critical point."""
    h = _mp(h)
    xc = critical_x(geometry)
    if point == "upper":
        x0, left, right = xc, Regime.II, Regime.I
    elif point == "lower" and isinstance(geometry, GeometrySquare):
        x0, left, right = 1 / xc, Regime.III, Regime.II
    else:
        raise DomainError("only square geometries have a lower critical point")
    fl = lambda t: f2_branch(geometry, t, left)
    fr = lambda t: f2_branch(geometry, t, right)
    l1, l2, l3 = _one_sided(fl, x0, h, -1)
    r1, r2, r3 = _one_sided(fr, x0, h, +1)
    a1 = f2_prime(geometry, x0, left) - f2_prime(geometry, x0, right)
    a2 = f2_second(geometry, x0, left) - f2_second(geometry, x0, right)
    a3 = (mpmath.diff(lambda t: f2_second(geometry, t, left), x0)
          - mpmath.diff(lambda t: f2_second(geometry, t, right), x0))
    return TransitionReport(
        geometry.to_json(), point, x0, h, abs(fl(x0) - fr(x0)),
        abs(l1 - r1), abs(l2 - r2), abs(l3 - r3), abs(a1), abs(a2), abs(a3),
    )


# -- free energy, wtZ -------------------------------------------------------

def free_energy(p: Real, q: Real, x: Real, delta: Real, alpha: Real = 1) -> mpf:
    p_, q_, x_, d_, a_ = (_mp(v) for v in (p, q, x, delta, alpha))
    ratio = (x_ - 1) / d_
    if ratio <= 0:
        raise DomainError("(x - 1)/Delta must be positive")
    if a_ <= 0:
        raise DomainError("alpha must be positive")
    geometry: Geometry = GeometrySquare(p) if as_fraction(p) == as_fraction(q) else GeometryRect(p, q)
    area = (p_ + 1) * (q_ + 1)
    return (-f2(geometry, x_) / area - p_ * q_ / area * mpmath.log(ratio)
            + (mpf(1) / 2 - 1 / area) * mpmath.log(x_) - (q_ - 1) / (q_ + 1) * mpmath.log(a_))


def wtZ_expansion(geometry: Geometry, x: Real, N: int, regime: Optional[Regime | str] = None) -> mpf:
    return f_terms(geometry, x, regime).log_wtZ(N)


def log_binomial_asymptotic(geometry: Geometry, N: int) -> mpf:
    if isinstance(geometry, GeometrySquare):
        r = _mp(geometry.r)
        return (N * ((r + 1) * mpmath.log(r + 1) - r * mpmath.log(r)) - mpmath.log(N) / 2
                - log_sqrt_2pi() - mpf(geometry.eps) / 2 * mpmath.log(r / (r + 1)))
    c1, cl, c0 = _log_binom_rect_terms(_mp(geometry.p))
    return N * c1 + cl * mpmath.log(N) + c0


# -- exact comparisons ------------------------------------------------------

def _log_fraction(value: Fraction) -> mpf:
    if value <= 0:
        raise DomainError("log of a non-positive value")
    return mpmath.log(mpf(value.numerator)) - mpmath.log(mpf(value.denominator))


def exact_P(spec: LatticeSpec, x: Fraction) -> Fraction:
    x = as_fraction(x)
    return P_at_one(spec) if x == 1 else P_via_pnew(spec, x)


def exact_log_P(spec: LatticeSpec, x) -> mpf:
    return _log_fraction(exact_P(spec, x))


def exact_log_wtZ(spec: LatticeSpec, x) -> mpf:
    return exact_log_P(spec, x) + _log_fraction(Fraction(math.comb(spec.M, spec.N)))


def rational_point(value: Real, max_den: int = 10 ** 6) -> Fraction:
    """Nearby rational with a small denominator; exact P needs a rational x.

    Large denominators make the exact determinant needlessly slow, and the
    prediction is always evaluated at the returned rational itself.
    """
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return Fraction(mpmath.nstr(_mp(value), 30, min_fixed=-mpmath.inf,
                                max_fixed=mpmath.inf)).limit_denominator(max_den)


CSV_COLUMNS = ("N", "M", "L", "x_num", "x_den", "logP_exact", "prediction",
               "residual", "residual_times_N")


@dataclass
class ConvergenceRow:
    spec: LatticeSpec
    x: Fraction
    regime: Regime
    logP_exact: mpf
    prediction: mpf

    @property
    def residual(self) -> mpf:
        return self.logP_exact - self.prediction

    def as_csv_row(self) -> list[str]:
        N, M, L = self.spec.as_tuple()
        return [str(N), str(M), str(L), str(self.x.numerator), str(self.x.denominator),
                mpmath.nstr(self.logP_exact, 30), mpmath.nstr(self.prediction, 30),
                mpmath.nstr(self.residual, 15), mpmath.nstr(self.residual * N, 15)]


def geometry_for(spec: LatticeSpec, kind: str) -> Geometry:
    if kind == "square":
        return GeometrySquare.from_spec(spec)
    if kind == "rect":
        return GeometryRect.from_spec(spec)
    raise ValueError(f"unknown geometry kind {kind!r}")


def convergence_row(spec: LatticeSpec, x: Real, kind: str,
                    regime: Optional[Regime | str] = None, dps: int = DPS) -> ConvergenceRow:
    xr = rational_point(x)
    geometry = geometry_for(spec, kind)
    with mpmath.workdps(dps):
        exp = f_terms(geometry, _mp(xr), regime)
        return ConvergenceRow(spec, xr, exp.regime, exact_log_P(spec, xr), exp.log_P(spec.N))


def convergence_table(specs: Iterable[LatticeSpec], x: Real, kind: str,
                      regime: Optional[Regime | str] = None, dps: int = DPS) -> list[ConvergenceRow]:
    return [convergence_row(s, x, kind, regime, dps) for s in specs]


def decay_ok(rows: list[ConvergenceRow], factor: Real = 3) -> bool:
    """|residual| strictly decreasing and N |residual| not growing by more than ``factor``."""
    res = [abs(r.residual) for r in rows]
    scaled = [abs(r.residual) * r.spec.N for r in rows]
    decreasing = all(b < a for a, b in zip(res, res[1:]))
    bounded = all(b <= _mp(factor) * a for a, b in zip(scaled, scaled[1:]))
    return decreasing and bounded


# -- eps = 0, Regime III ------------------------------------------------------

def e0_regimeIII_prediction(r_exact: Real, N: int, x: Real) -> mpf:
    """N^2 f2^III + N log sqrt x + log(1-x)/4, the eps = 0 form of log wtZ."""
    r = as_fraction(r_exact) if not isinstance(r_exact, mpf) else r_exact
    geometry = GeometrySquare(r, 0)
    x = _mp(x)
    if Regime.III not in classify_regime(geometry, x):
        raise DomainError("x is outside Regime III")
    return (N * N * f2_square(r, x, Regime.III) + N * mpmath.log(x) / 2
            + mpmath.log(1 - x) / 4)


def e0_gauge_form(r_exact: Real, N: int, x: Real) -> mpf:
    """Same quantity written through a = N, c = r N - 1/2."""
    c = as_fraction(r_exact) * N - Fraction(1, 2)
    x = _mp(x)
    cm = _mp(c)
    return -N * cm * mpmath.log(x) - cm * (cm + 1) * mpmath.log(1 - x)


def e0_residual(spec: LatticeSpec, x) -> mpf:
    geometry = GeometrySquare.from_spec(spec)
    if geometry.eps != 0:
        raise DomainError("the eps = 0 prediction needs M = L - 1")
    xr = rational_point(x)
    return exact_log_wtZ(spec, xr) - e0_regimeIII_prediction(geometry.r, spec.N, _mp(xr))


# -- reductions ---------------------------------------------------------------

def reduction_gaps(r: Real, x: Real) -> dict[str, mpf]:
    """Rectangle formulas at p = q = r against the square ones at eps = 0."""
    with mpmath.workdps(DPS):
        sq = f_terms_square(r, 0, x, Regime.II)
        rc = f_terms_rect(r, r, x, Regime.II)
    return {"f2": abs(sq.f2 - rc.f2), "f1": abs(sq.f1 - rc.f1), "f0": abs(sq.f0 - rc.f0)}


def eps_squared_from_rect(r: Real, eps: int, x: Real, N: int = 10 ** 6) -> tuple[mpf, mpf]:
    """eps^2 part of f0^II two ways: the closed form, and N^2 f2^II at q, p = r +- eps/2N."""
    r = as_fraction(r)
    shift = Fraction(eps, 2 * N)
    with mpmath.workdps(max(DPS, 60)):
        xx = _mp(x)
        split = N * N * (f2_rect(r - shift, r + shift, xx, Regime.II) - f2_rect(r, r, xx, Regime.II))
        sq = f_terms_square(r, eps, xx, Regime.II).f0 - f_terms_square(r, 0, xx, Regime.II).f0
    return sq, split


__all__ = [
    "DPS", "Regime", "GeometrySquare", "GeometryRect", "AsymptoticExpansion",
    "critical_x", "classify_regime", "f_terms_square", "f_terms_rect", "f_terms",
    "f2", "f2_branch", "f2_square", "f2_rect", "f2_prime", "f2_second", "rho_prime",
    "quartic_x", "solve_quartic_branch", "s_rect", "sigma2_leading", "sigma2_branch",
    "B2_tilde", "wtZ_expansion", "log_binomial_asymptotic", "free_energy",
    "log_barnes_G", "log_barnes_G_exact", "log_barnes_G_asymptotic", "barnes_G_int",
    "zeta_prime_minus_one", "log_sqrt_2pi", "third_order_scan", "TransitionReport",
    "e0_regimeIII_prediction", "e0_gauge_form", "e0_residual", "exact_log_P",
    "exact_log_wtZ", "rational_point", "convergence_row", "convergence_table",
    "ConvergenceRow", "CSV_COLUMNS", "decay_ok", "reduction_gaps", "eps_squared_from_rect",
]
