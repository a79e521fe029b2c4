"""Perfect sampling with weight x**(-l5) by coupling from the past.

States are plane-partition height arrays (see :mod:`fivevertex.model`).  The
dynamics is a single-site heat bath: site (r, j) is redrawn from its exact
conditional law on the interval allowed by its four neighbours, using one
uniform variate by inverse CDF.  Sites are visited row-major; one pass is a
sweep.  Variates for the sweep at time -t come from a generator keyed by
(seed, t), so earlier randomness is regenerated rather than stored.

The measure is log-supermodular in the height order when x <= 1, which makes
the coupling monotone.  For x > 1 that argument fails once a column can take
three or more values, so ``cftp_sample`` warns in that case and the
sandwich probe can be used to look for violations.
"""
from __future__ import annotations

import json
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .model import (
    VERTEX_TYPES,
    Configuration,
    LatticeSpec,
    PlanePartition,
    SpecError,
    plane_partition_to_config,
    turn_pairs_from_heights,
    vertex_grid,
)
from .polynomial import as_fraction, fraction_str

log = logging.getLogger(__name__)

DEFAULT_MAX_SWEEPS = 1 << 20
HEIGHT_DTYPE = np.int_


class SamplerTimeout(RuntimeError):
    """Raised when the chains have not coalesced within the sweep cap."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


class MonotonicityWarning(UserWarning):
    pass


def _box(spec: LatticeSpec) -> tuple[int, int, int]:
    return spec.box


def _x_float(x) -> float:
    fx = as_fraction(x) if not isinstance(x, float) else x
    value = float(fx)
    if value <= 0:
        raise ValueError("x must be positive")
    return value


@dataclass
class HeightState:
    heights: np.ndarray
    spec: LatticeSpec

    @classmethod
    def minimal(cls, spec: LatticeSpec) -> "HeightState":
        a, b, _ = _box(spec)
        return cls(np.zeros((a, b), dtype=HEIGHT_DTYPE), spec)

    @classmethod
    def maximal(cls, spec: LatticeSpec) -> "HeightState":
        a, b, c = _box(spec)
        return cls(np.full((a, b), c, dtype=HEIGHT_DTYPE), spec)

    @classmethod
    def from_plane_partition(cls, pp: PlanePartition, spec: LatticeSpec) -> "HeightState":
        a, b, _ = _box(spec)
        return cls(np.array(pp.heights, dtype=HEIGHT_DTYPE).reshape(a, b), spec)

    def copy(self) -> "HeightState":
        return HeightState(self.heights.copy(), self.spec)

    @property
    def l5(self) -> int:
        return turn_pairs_from_heights(self.heights.tolist(), self.spec.N)

    def to_plane_partition(self) -> PlanePartition:
        return PlanePartition(tuple(tuple(int(v) for v in row) for row in self.heights),
                              self.spec.box)

    def to_configuration(self) -> Configuration:
        return plane_partition_to_config(self.to_plane_partition(), self.spec)

    def __le__(self, other: "HeightState") -> bool:
        return bool(np.all(self.heights <= other.heights))

    def __eq__(self, other) -> bool:
        return isinstance(other, HeightState) and np.array_equal(self.heights, other.heights)


def sweep_uniforms(seed: int, t: int, shape: tuple[int, int]) -> np.ndarray:
    """Variates for the sweep at time -t; a pure function of (seed, t)."""
    ss = np.random.SeedSequence([seed & ((1 << 64) - 1), t])
    return np.random.Generator(np.random.PCG64(ss)).random(shape)


def sample_seed(seed: int, index: int) -> int:
    """Independent 64-bit seed for the index-th sample of a batch."""
    return int(np.random.SeedSequence([seed & ((1 << 64) - 1), index]).generate_state(1, np.uint64)[0])


def heat_bath_step(state: HeightState, site: tuple[int, int], u: float, x,
                   backend: Optional[str] = None) -> HeightState:
    """New state with site (r, j) redrawn from its conditional law using u."""
    r, j = site
    a, b, c = _box(state.spec)
    if not (0 <= r < a and 0 <= j < b):
        raise IndexError(f"site {site} outside the {a}x{b} array")
    out = state.copy()
    kernels.get_backend(backend).update_site(out.heights, r, j, float(u), _x_float(x), c)
    return out


def monotone_guaranteed(spec: LatticeSpec, x) -> bool:
    """True when the heat-bath coupling is provably order preserving."""
    a, b, c = _box(spec)
    return _x_float(x) <= 1.0 or c <= 1 or a <= 1 or b == 0


@dataclass
class Sample:
    spec: LatticeSpec
    x: Fraction
    seed: int
    coalescence_T: int
    state: HeightState

    @property
    def configuration(self) -> Configuration:
        return self.state.to_configuration()

    @property
    def l5(self) -> int:
        return self.state.l5

    def to_json(self) -> dict:
        return {
            "spec": {"N": self.spec.N, "M": self.spec.M, "L": self.spec.L},
            "x": fraction_str(self.x),
            "seed": self.seed,
            "coalescence_T": self.coalescence_T,
            "slices": [list(s) for s in self.configuration.slices],
        }


@dataclass
class SamplerRun:
    """Bookkeeping for one CFTP call: the epochs tried and where it stopped."""

    seed: int
    x: Fraction
    epochs: list[int] = field(default_factory=list)
    coalescence_T: Optional[int] = None


def cftp_sample(spec: LatticeSpec, x, seed: int, max_sweeps: int = DEFAULT_MAX_SWEEPS,
                backend: Optional[str] = None, run: Optional[SamplerRun] = None) -> Sample:
    """One exact draw from x**(-l5) (exact as long as the coupling is monotone)."""
    xf = as_fraction(x)
    xv = _x_float(xf)
    a, b, c = _box(spec)
    run = run if run is not None else SamplerRun(seed, xf)
    if a == 0 or b == 0 or c == 0:
        run.coalescence_T = 0
        return Sample(spec, xf, seed, 0, HeightState.minimal(spec))
    if not monotone_guaranteed(spec, xf):
        warnings.warn(f"heat-bath coupling is not known to be monotone at x = {xf} for box "
                      f"{spec.box}; run the sandwich probe before trusting these samples",
                      MonotonicityWarning, stacklevel=2)
    kern = kernels.get_backend(backend)
    T = 2
    while True:
        run.epochs.append(T)
        lower = np.zeros((a, b), dtype=HEIGHT_DTYPE)
        upper = np.full((a, b), c, dtype=HEIGHT_DTYPE)
        same = False
        for t in range(T, 0, -1):
            same = kern.coupled_sweep(lower, upper, sweep_uniforms(seed, t, (a, b)), xv, c)
        if same:
            run.coalescence_T = T
            log.debug("coalesced: spec=%s x=%s seed=%d T=%d", spec.as_tuple(), xf, seed, T)
            return Sample(spec, xf, seed, T, HeightState(lower, spec))
        if 2 * T > max_sweeps:
            gap = int(np.abs(upper - lower).sum())
            raise SamplerTimeout(
                f"no coalescence within {T} sweeps",
                {"spec": spec.as_tuple(), "x": str(xf), "seed": seed, "epochs": run.epochs,
                 "remaining_gap": gap},
            )
        T *= 2


def cftp_samples(spec: LatticeSpec, x, count: int, seed: int, **kwargs) -> list[Sample]:
    return [cftp_sample(spec, x, sample_seed(seed, k), **kwargs) for k in range(count)]


def write_archive(samples: Iterable[Sample], stream) -> None:
    for s in samples:
        stream.write(json.dumps(s.to_json()) + "\n")


# -- monotonicity probe -------------------------------------------------------

@dataclass
class ProbeReport:
    spec: LatticeSpec
    x: Fraction
    trials: int
    violations: int
    examples: list[dict]

    def to_json(self) -> dict:
        return {"spec": list(self.spec.as_tuple()), "x": fraction_str(self.x),
                "trials": self.trials, "violations": self.violations,
                "examples": self.examples}


def _random_state(spec: LatticeSpec, rng: np.random.Generator, kern) -> np.ndarray:
    a, b, c = _box(spec)
    H = np.zeros((a, b), dtype=HEIGHT_DTYPE)
    # a few uniform-measure sweeps from a random corner give varied states
    if rng.random() < 0.5:
        H[...] = c
    for _ in range(int(rng.integers(0, 4))):
        kern.sweep(H, rng.random((a, b)), 1.0, c)
    return H


def sandwich_probe(spec: LatticeSpec, x, trials: int, seed: int = 0,
                   backend: Optional[str] = None, keep: int = 5) -> ProbeReport:
    """Apply random single-site updates to random ordered pairs A <= B and
    count the trials after which A' <= B' fails."""
    xf = as_fraction(x)
    xv = _x_float(xf)
    a, b, c = _box(spec)
    kern = kernels.get_backend(backend)
    rng = np.random.default_rng(seed)
    violations = 0
    examples: list[dict] = []
    if a == 0 or b == 0:
        return ProbeReport(spec, xf, trials, 0, [])
    for _ in range(trials):
        X, Y = _random_state(spec, rng, kern), _random_state(spec, rng, kern)
        A, B = np.minimum(X, Y), np.maximum(X, Y)
        r, j = int(rng.integers(a)), int(rng.integers(b))
        u = float(rng.random())
        A0, B0 = A.copy(), B.copy()
        kern.update_site(A, r, j, u, xv, c)
        kern.update_site(B, r, j, u, xv, c)
        if np.any(A > B):
            violations += 1
            if len(examples) < keep:
                examples.append({"A": A0.tolist(), "B": B0.tolist(), "site": [r, j], "u": u})
    if violations:
        log.warning("sandwich probe: %d violations in %d trials (spec=%s, x=%s)",
                    violations, trials, spec.as_tuple(), xf)
    return ProbeReport(spec, xf, trials, violations, examples)


# -- densities ----------------------------------------------------------------

@dataclass
class VertexDensities:
    """freq[t, j, k]: share of samples with type VERTEX_TYPES[k] at row t+1, column j+1."""

    spec: LatticeSpec
    freq: np.ndarray
    samples: int

    def of_type(self, vtype: int) -> np.ndarray:
        return self.freq[:, :, VERTEX_TYPES.index(vtype)]

    def entropy(self) -> np.ndarray:
        p = self.freq
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, -p * np.log(p), 0.0)
        return terms.sum(axis=2)


def _as_configuration(item) -> tuple[Configuration, Optional[LatticeSpec]]:
    if isinstance(item, Sample):
        return item.configuration, item.spec
    return item, None


def measure_vertex_densities(samples: Sequence, spec: LatticeSpec) -> VertexDensities:
    if not samples:
        raise ValueError("need at least one sample")
    counts = np.zeros((spec.M, spec.L, len(VERTEX_TYPES)), dtype=np.int64)
    index = {v: k for k, v in enumerate(VERTEX_TYPES)}
    for item in samples:
        config, own = _as_configuration(item)
        if own is not None and own != spec:
            raise SpecError(f"sample for {own.as_tuple()} mixed into {spec.as_tuple()}")
        grid = np.array(vertex_grid(config, spec), dtype=np.int64)
        for v, k in index.items():
            counts[:, :, k] += grid == v
    return VertexDensities(spec, counts / len(samples), len(samples))


# -- phase smoke test -----------------------------------------------------------

@dataclass
class ConnectivityReport:
    components: int
    sizes: list[int]
    threshold: float
    min_size: int

    @property
    def split(self) -> bool:
        return self.components >= 2


def disordered_components(densities: VertexDensities, threshold: float = 0.35,
                          min_fraction: float = 0.01) -> ConnectivityReport:
    """Count 4-connected clusters of high-entropy cells.

    A cell is disordered when the entropy of its empirical vertex-type law
    exceeds ``threshold`` nats.  Clusters smaller than ``min_fraction`` of the
    lattice are treated as noise.
    """
    from scipy import ndimage

    mask = densities.entropy() > threshold
    labels, n = ndimage.label(mask)
    sizes = sorted((int((labels == k).sum()) for k in range(1, n + 1)), reverse=True)
    min_size = max(1, int(min_fraction * mask.size))
    kept = [s for s in sizes if s >= min_size]
    return ConnectivityReport(len(kept), kept, threshold, min_size)


__all__ = [
    "HeightState", "Sample", "SamplerRun", "SamplerTimeout", "MonotonicityWarning",
    "heat_bath_step", "cftp_sample", "cftp_samples", "sweep_uniforms", "sample_seed",
    "monotone_guaranteed", "sandwich_probe", "ProbeReport", "measure_vertex_densities",
    "VertexDensities", "disordered_components", "ConnectivityReport", "write_archive",
]
