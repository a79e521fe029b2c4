"""Lattice model, configurations and the brute-force oracle.

A configuration is stored as slices S_0..S_M.  Slice S_t lists the columns
where the N vertical lines cross the horizontal edge row above vertex row t,
so path i occupies columns c_i(t-1)..c_i(t) in row t.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .polynomial import ExactPolynomial, as_fraction

DEFAULT_MAX_CONFIGS = 10**7

EMPTY, VERTICAL, HORIZONTAL, TURN_UP, TURN_RIGHT = 1, 3, 4, 5, 6
VERTEX_TYPES = (EMPTY, VERTICAL, HORIZONTAL, TURN_UP, TURN_RIGHT)


class SpecError(ValueError):
    """Invalid lattice parameters."""


class StructuralError(ValueError):
    """Slices that do not describe an admissible configuration."""


class ResourceError(RuntimeError):
    """A computation would exceed a configured resource cap."""


def max_configs() -> int:
    env = os.environ.get("FIVEVERTEX_MAX_CONFIGS")
    return int(env) if env else DEFAULT_MAX_CONFIGS


@dataclass(frozen=True)
class LatticeSpec:
    N: int
    M: int
    L: int

    def __post_init__(self):
        for name in ("N", "M", "L"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise SpecError(f"{name} must be an integer, got {v!r}")
        if self.M < 1 or self.L < 1:
            raise SpecError("M and L must be positive")
        if not (0 <= self.N <= self.M and self.N <= self.L):
            raise SpecError(f"need 0 <= N <= min(M, L), got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.N, self.M, self.L)

    @property
    def degree(self) -> int:
        """deg P = N min(M-N, L-N-1), with L = N treated as degree 0."""
        if self.N == 0 or self.L == self.N:
            return 0
        return self.N * min(self.M - self.N, self.L - self.N - 1)

    @property
    def box(self) -> tuple[int, int, int]:
        return (self.L - self.N, self.N, self.M - self.N)

    def initial_slice(self) -> tuple[int, ...]:
        return tuple(range(1, self.N + 1))

    def final_slice(self) -> tuple[int, ...]:
        return tuple(range(self.L - self.N + 1, self.L + 1))

    def dual(self) -> "LatticeSpec":
        """The spec (N, L-1, M+1) sharing the same P."""
        return LatticeSpec(self.N, self.L - 1, self.M + 1)

    def to_json(self) -> dict:
        return {"N": self.N, "M": self.M, "L": self.L}


@dataclass(frozen=True)
class Configuration:
    slices: tuple[tuple[int, ...], ...]

    @classmethod
    def from_slices(cls, slices: Sequence[Sequence[int]]) -> "Configuration":
        return cls(tuple(tuple(int(c) for c in s) for s in slices))

    def validate(self, spec: LatticeSpec) -> None:
        s = self.slices
        if len(s) != spec.M + 1:
            raise StructuralError(f"expected {spec.M + 1} slices, got {len(s)}")
        if any(len(row) != spec.N for row in s):
            raise StructuralError("every slice must have N entries")
        if s[0] != spec.initial_slice() or s[-1] != spec.final_slice():
            raise StructuralError("boundary slices do not match the boundary condition")
        for t in range(spec.M):
            a, b = s[t], s[t + 1]
            for i in range(spec.N):
                upper = a[i + 1] if i + 1 < spec.N else spec.L + 1
                if not (a[i] <= b[i] < upper):
                    raise StructuralError(f"interlacing violated at t={t}, i={i}")


@dataclass(frozen=True)
class VertexCounts:
    l1: int
    l3: int
    l4: int
    l5: int
    l6: int

    def check(self, spec: LatticeSpec) -> None:
        N, M, L = spec.as_tuple()
        if self.l1 != (L - N) * (M - N):
            raise AssertionError("l1 != (L-N)(M-N)")
        if self.l3 - self.l4 != N * (M + N - L):
            raise AssertionError("l3 - l4 != N(M+N-L)")
        if self.l5 != self.l6:
            raise AssertionError("l5 != l6")
        if self.l1 + self.l3 + self.l4 + self.l5 + self.l6 != M * L:
            raise AssertionError("vertex counts do not sum to M*L")


@dataclass(frozen=True)
class PlanePartition:
    heights: tuple[tuple[int, ...], ...]
    box: tuple[int, int, int]

    def validate(self) -> None:
        a, b, c = self.box
        h = self.heights
        if len(h) != a or any(len(row) != b for row in h):
            raise StructuralError("height array has the wrong shape")
        for r in range(a):
            for j in range(b):
                v = h[r][j]
                if not 0 <= v <= c:
                    raise StructuralError("height out of range")
                if r + 1 < a and h[r + 1][j] > v:
                    raise StructuralError("heights must decrease down columns")
                if j + 1 < b and h[r][j + 1] > v:
                    raise StructuralError("heights must decrease along rows")

    @property
    def volume(self) -> int:
        return sum(map(sum, self.heights))


# -- enumeration ---------------------------------------------------------------

def macmahon_PL(a: int, b: int, c: int) -> int:
    """Number of plane partitions in an a x b x c box."""
    if min(a, b, c) < 0:
        raise ValueError("box dimensions must be non-negative")
    num = den = 1
    for j in range(a):
        num *= math.factorial(b + c + j) * math.factorial(j)
        den *= math.factorial(b + j) * math.factorial(c + j)
    return num // den


def configuration_count(spec: LatticeSpec) -> int:
    return macmahon_PL(*spec.box)


def enumerate_configurations(spec: LatticeSpec, cap: int | None = None) -> Iterator[Configuration]:
    """Yield each admissible configuration once (depth-first over slices)."""
    cap = max_configs() if cap is None else cap
    total = configuration_count(spec)
    if total > cap:
        raise ResourceError(f"{total} configurations exceed the cap of {cap}")
    N, M, L = spec.as_tuple()
    final = spec.final_slice()
    slices: list[tuple[int, ...]] = [spec.initial_slice()]

    def choices(prev: tuple[int, ...], t_next: int):
        # path i must sit on its final column once t_next >= M - i + 1 (1-based i)
        out: list[int] = [0] * N

        def rec(i: int):
            if i < 0:
                yield tuple(out)
                return
            upper = prev[i + 1] - 1 if i + 1 < N else L
            upper = min(upper, final[i])
            lo = prev[i]
            if t_next >= M - i:  # 0-based i: deadline M - (i+1) + 1
                lo = final[i]
            for v in range(lo, upper + 1):
                out[i] = v
                yield from rec(i - 1)

        yield from rec(N - 1)

    def dfs(t: int):
        if t == M:
            yield Configuration(tuple(slices))
            return
        for nxt in choices(slices[-1], t + 1):
            slices.append(nxt)
            yield from dfs(t + 1)
            slices.pop()

    if N == 0:
        yield Configuration(tuple(() for _ in range(M + 1)))
        return
    yield from dfs(0)


def ferroelectric_configuration(spec: LatticeSpec) -> Configuration:
    """Each path i turns only in row N - i + 1 (the minimal-turn state)."""
    return plane_partition_to_config(
        PlanePartition(tuple((0,) * spec.N for _ in range(spec.L - spec.N)), spec.box), spec
    )


# -- vertex types --------------------------------------------------------------

def vertex_grid(config: Configuration, spec: LatticeSpec) -> list[list[int]]:
    """Vertex type per cell; grid[t-1][j-1] for row t = 1..M and column j = 1..L."""
    config.validate(spec)
    grid = [[EMPTY] * spec.L for _ in range(spec.M)]
    s = config.slices
    for t in range(1, spec.M + 1):
        row = grid[t - 1]
        for i in range(spec.N):
            a, b = s[t - 1][i], s[t][i]
            if a == b:
                row[a - 1] = VERTICAL
                continue
            row[a - 1] = TURN_RIGHT
            for j in range(a + 1, b):
                row[j - 1] = HORIZONTAL
            row[b - 1] = TURN_UP
    return grid


def vertex_counts(config: Configuration, spec: LatticeSpec) -> VertexCounts:
    counts = dict.fromkeys(VERTEX_TYPES, 0)
    for row in vertex_grid(config, spec):
        for v in row:
            counts[v] += 1
    vc = VertexCounts(counts[EMPTY], counts[VERTICAL], counts[HORIZONTAL],
                      counts[TURN_UP], counts[TURN_RIGHT])
    return vc


def turn_pairs(config: Configuration) -> int:
    """l5: the number of (path, row) pairs in which the path moves right."""
    s = config.slices
    return sum(1 for t in range(1, len(s)) for a, b in zip(s[t - 1], s[t]) if a != b)


def brute_force_tilde_Z(spec: LatticeSpec, cap: int | None = None) -> ExactPolynomial:
    """Sum of u**(l5 - N) over all configurations, u = 1/x."""
    hist: dict[int, int] = {}
    for conf in enumerate_configurations(spec, cap):
        k = turn_pairs(conf) - spec.N
        hist[k] = hist.get(k, 0) + 1
    return ExactPolynomial.from_dict(hist)


def literal_P(spec: LatticeSpec, cap: int | None = None) -> ExactPolynomial:
    """tilde Z / binomial(M, N) with no convention applied.

    For L = N this is the Laurent monomial u^{-N} / binomial(M, N).
    """
    return brute_force_tilde_Z(spec, cap) / math.comb(spec.M, spec.N)


def brute_force_P(spec: LatticeSpec, cap: int | None = None) -> ExactPolynomial:
    """The oracle polynomial P.  For L = N it is 1 by convention."""
    if spec.L == spec.N:
        return ExactPolynomial.constant(1)
    return literal_P(spec, cap)


# -- weights -------------------------------------------------------------------

@dataclass(frozen=True)
class SurdValue:
    """coeff * root**(half/2): exact products of rationals and powers of sqrt(x)."""

    coeff: Fraction
    root: Fraction
    half: int = 0

    def __post_init__(self):
        if self.half % 2 == 0 and self.half:
            object.__setattr__(self, "coeff", self.coeff * self.root ** (self.half // 2))
            object.__setattr__(self, "half", 0)
        elif self.half % 2:
            shift = (self.half - 1) // 2
            if shift:
                object.__setattr__(self, "coeff", self.coeff * self.root ** shift)
                object.__setattr__(self, "half", 1)
        sq = _rational_sqrt(self.root)
        if self.half == 1 and sq is not None:
            object.__setattr__(self, "coeff", self.coeff * sq)
            object.__setattr__(self, "half", 0)

    def __mul__(self, other: "SurdValue") -> "SurdValue":
        if isinstance(other, SurdValue):
            if self.root != other.root:
                raise ValueError("surds over different radicands")
            return SurdValue(self.coeff * other.coeff, self.root, self.half + other.half)
        return SurdValue(self.coeff * as_fraction(other), self.root, self.half)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "SurdValue":
        return SurdValue(self.coeff ** n, self.root, self.half * n)

    def is_rational(self) -> bool:
        return self.half == 0

    def rational(self) -> Fraction:
        if self.half:
            raise ValueError("value is irrational")
        return self.coeff

    def __float__(self) -> float:
        return float(self.coeff) * (math.sqrt(self.root) if self.half else 1.0)

    def __str__(self) -> str:
        if self.half == 0:
            return str(self.coeff)
        return f"{self.coeff}*sqrt({self.root})"


def _rational_sqrt(q: Fraction) -> Fraction | None:
    n, d = q.numerator, q.denominator
    if n < 0:
        return None
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class Weights:
    """Boltzmann weights.  ``gauge`` is 'parametrized', 'simulation' or 'free-fermion'."""

    x: Fraction = Fraction(1)
    delta: Fraction | None = None
    alpha: Fraction = Fraction(1)
    gauge: str = "parametrized"

    def __post_init__(self):
        object.__setattr__(self, "x", as_fraction(self.x))
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.delta is not None:
            object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.gauge not in ("parametrized", "simulation", "free-fermion"):
            raise ValueError(f"unknown gauge {self.gauge!r}")
        if self.gauge == "free-fermion":
            return
        if self.x <= 0:
            raise ValueError("x must be positive")
        if self.gauge == "parametrized":
            if self.delta is None or self.delta == 0:
                raise ValueError("Delta = 0 needs the free-fermion marker")
            if self.alpha <= 0:
                raise ValueError("alpha must be positive")
            if (self.x - 1) / self.delta <= 0:
                raise ValueError("sign of Delta must match sign of x - 1")

    @classmethod
    def simulation(cls, x) -> "Weights":
        return cls(x=as_fraction(x), gauge="simulation")

    @classmethod
    def free_fermion(cls) -> "Weights":
        return cls(gauge="free-fermion")

    def _s(self, coeff, half=0) -> SurdValue:
        return SurdValue(as_fraction(coeff), self.x, half)

    def vertex_weights(self) -> dict[int, SurdValue]:
        if self.gauge == "free-fermion":
            one = SurdValue(Fraction(1), Fraction(1))
            return dict.fromkeys(VERTEX_TYPES, one)
        if self.gauge == "simulation":
            one = self._s(1)
            turn = self._s(Fraction(1) / self.x, 1)  # x^{-1} * x^{1/2}
            return {EMPTY: one, VERTICAL: one, HORIZONTAL: one, TURN_UP: turn, TURN_RIGHT: turn}
        a, x = self.alpha, self.x
        return {
            EMPTY: self._s(a * (x - 1) / (self.delta * x), 1),
            VERTICAL: self._s(1 / a, 1),
            HORIZONTAL: self._s(a, 1),
            TURN_UP: self._s(1),
            TURN_RIGHT: self._s(1),
        }

    def delta_identity(self) -> SurdValue:
        """(w3 w4 - w5 w6) / (w1 w3), which should reproduce Delta."""
        w = self.vertex_weights()
        num = (w[VERTICAL] * w[HORIZONTAL]).rational() - (w[TURN_UP] * w[TURN_RIGHT]).rational()
        den = (w[EMPTY] * w[VERTICAL]).rational()
        return SurdValue(num / den, w[EMPTY].root)


def config_weight(config: Configuration, weights: Weights, spec: LatticeSpec) -> SurdValue:
    vc = vertex_counts(config, spec)
    w = weights.vertex_weights()
    out = SurdValue(Fraction(1), w[EMPTY].root)
    for t, n in ((EMPTY, vc.l1), (VERTICAL, vc.l3), (HORIZONTAL, vc.l4),
                 (TURN_UP, vc.l5), (TURN_RIGHT, vc.l6)):
        if n:
            out = out * w[t] ** n
    return out


def empty_weight_E(spec: LatticeSpec, weights: Weights) -> SurdValue:
    """((x-1)/Delta)^{(L-N)(M-N)} (alpha/sqrt x)^{M(L-2N)} x^{N(L-N-1)}, evaluated literally."""
    if weights.gauge != "parametrized":
        raise ValueError("E is defined in the parametrized gauge")
    x = weights.x
    if x == 1:
        raise ValueError("E is singular at x = 1")
    N, M, L = spec.as_tuple()
    k = M * (L - 2 * N)
    val = SurdValue(((x - 1) / weights.delta) ** ((L - N) * (M - N)) * weights.alpha ** k
                    * x ** (N * (L - N - 1)), x, 0)
    return val * SurdValue(Fraction(1), x, -k)


def partition_function(spec: LatticeSpec, weights: Weights, cap: int | None = None) -> SurdValue:
    total: SurdValue | None = None
    acc: dict[int, Fraction] = {}
    root = weights.vertex_weights()[EMPTY].root
    for conf in enumerate_configurations(spec, cap):
        w = config_weight(conf, weights, spec)
        acc[w.half] = acc.get(w.half, Fraction(0)) + w.coeff
    parts = [SurdValue(c, root, h) for h, c in acc.items() if c]
    if not parts:
        return SurdValue(Fraction(0), root)
    for p in parts:
        if total is None:
            total = p
        elif p.half == total.half:
            total = SurdValue(total.coeff + p.coeff, root, p.half)
        else:
            raise ValueError("sum mixes rational and irrational parts")
    return total


# -- plane partitions ------------------------------------------------------------

def _right_step_rows(config: Configuration, spec: LatticeSpec) -> list[list[int]]:
    """rows[i][k-1]: row in which path i (0-based) makes its k-th right step."""
    s = config.slices
    rows: list[list[int]] = [[] for _ in range(spec.N)]
    for t in range(1, spec.M + 1):
        for i in range(spec.N):
            rows[i].extend([t] * (s[t][i] - s[t - 1][i]))
    return rows


def config_to_plane_partition(config: Configuration, spec: LatticeSpec) -> PlanePartition:
    config.validate(spec)
    N, _, L = spec.as_tuple()
    a = L - N
    rows = _right_step_rows(config, spec)
    # path index i (1-based) = j + 1, step index k = a - r
    heights = tuple(
        tuple(rows[j][a - r - 1] - (N - (j + 1)) - 1 for j in range(N)) for r in range(a)
    )
    return PlanePartition(heights, spec.box)


def plane_partition_to_config(pp: PlanePartition, spec: LatticeSpec) -> Configuration:
    pp.validate()
    N, M, L = spec.as_tuple()
    a = L - N
    if N == 0:
        return Configuration(tuple(() for _ in range(M + 1)))
    # step_rows[i][k-1] = H[a-k][i] + N - (i+1) + 1
    step_rows = [[pp.heights[a - k][i] + N - i for k in range(1, a + 1)] for i in range(N)]
    slices = []
    for t in range(M + 1):
        slices.append(tuple(i + 1 + sum(1 for tr in step_rows[i] if tr <= t) for i in range(N)))
    conf = Configuration(tuple(slices))
    conf.validate(spec)
    return conf


def turn_pairs_from_heights(heights: Sequence[Sequence[int]], N: int) -> int:
    """l5 computed directly on a height array (rows r, columns j)."""
    a = len(heights)
    if N == 0:
        return 0
    if a == 0:
        return 0
    total = N
    for j in range(N):
        for r in range(a - 1):
            if heights[r][j] > heights[r + 1][j]:
                total += 1
    return total


def spec_from_box(a: int, b: int, c: int) -> LatticeSpec:
    """Inverse of LatticeSpec.box."""
    return LatticeSpec(b, b + c, a + b)


__all__ = [
    "LatticeSpec", "Configuration", "VertexCounts", "PlanePartition", "Weights", "SurdValue",
    "SpecError", "StructuralError", "ResourceError",
    "enumerate_configurations", "vertex_counts", "vertex_grid", "turn_pairs",
    "brute_force_tilde_Z", "brute_force_P", "literal_P", "config_weight", "empty_weight_E",
    "partition_function", "config_to_plane_partition", "plane_partition_to_config",
    "macmahon_PL", "configuration_count", "ferroelectric_configuration",
    "turn_pairs_from_heights", "spec_from_box", "max_configs",
]
