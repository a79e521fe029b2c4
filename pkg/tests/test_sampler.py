import io
import json
import warnings
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from fivevertex.model import (
    LatticeSpec,
    SpecError,
    config_to_plane_partition,
    enumerate_configurations,
    ferroelectric_configuration,
    turn_pairs,
    vertex_grid,
)
from fivevertex.model import VERTEX_TYPES
from fivevertex.sampler import (
    HeightState,
    MonotonicityWarning,
    SamplerRun,
    SamplerTimeout,
    cftp_sample,
    cftp_samples,
    disordered_components,
    heat_bath_step,
    measure_vertex_densities,
    monotone_guaranteed,
    sample_seed,
    sandwich_probe,
    sweep_uniforms,
    write_archive,
)


def exact_law(spec, x):
    w = {c.slices: Fraction(1) / Fraction(x) ** turn_pairs(c) for c in enumerate_configurations(spec)}
    Z = sum(w.values())
    return {k: v / Z for k, v in w.items()}


def tv(samples, law):
    cnt = Counter(s.configuration.slices for s in samples)
    n = len(samples)
    return sum(abs(cnt.get(k, 0) / n - float(p)) for k, p in law.items()) / 2


def test_height_state_roundtrip():
    spec = LatticeSpec(2, 4, 5)
    for conf in enumerate_configurations(spec):
        st = HeightState.from_plane_partition(config_to_plane_partition(conf, spec), spec)
        assert st.to_configuration() == conf
        assert st.l5 == turn_pairs(conf)
    lo, hi = HeightState.minimal(spec), HeightState.maximal(spec)
    assert lo <= hi and not hi <= lo
    assert lo.to_configuration() == ferroelectric_configuration(spec)
    assert lo == lo.copy()


def test_uniforms_are_pure():
    a = sweep_uniforms(7, 3, (2, 3))
    assert np.array_equal(a, sweep_uniforms(7, 3, (2, 3)))
    assert not np.array_equal(a, sweep_uniforms(7, 4, (2, 3)))
    assert sample_seed(1, 0) != sample_seed(1, 1)


@pytest.mark.parametrize("x", [Fraction(1, 3), Fraction(1), Fraction(5, 2)])
def test_conditional_law(x):
    # the share of u in [0, 1) sent to each height matches x^{-l5} restricted to the site
    spec = LatticeSpec(2, 5, 5)
    rng = np.random.default_rng(4)
    confs = list(enumerate_configurations(spec))
    grid = (np.arange(4000) + 0.5) / 4000
    for k in rng.choice(len(confs), 6, replace=False):
        st = HeightState.from_plane_partition(config_to_plane_partition(confs[k], spec), spec)
        a, b, c = spec.box
        site = (int(rng.integers(a)), int(rng.integers(b)))
        outs = Counter(int(heat_bath_step(st, site, u, x).heights[site]) for u in grid)
        weights = {}
        for h in range(c + 1):
            trial = st.copy()
            trial.heights[site] = h
            H = trial.heights
            if all(H[r, j] >= H[r, j + 1] for r in range(a) for j in range(b - 1)) and \
               all(H[r, j] >= H[r + 1, j] for r in range(a - 1) for j in range(b)):
                weights[h] = float(Fraction(1) / x ** trial.l5)
        Z = sum(weights.values())
        assert set(outs) == set(weights)
        for h, w in weights.items():
            assert abs(outs[h] / len(grid) - w / Z) < 2e-3


def test_detailed_balance_ratio_123():
    spec = LatticeSpec(1, 2, 3)
    x = Fraction(3)
    st = HeightState.minimal(spec)  # 2x1 array
    # site (1, 0) with the top cell raised can take 0 (l5 = 2) or 1 (l5 = 1)
    st.heights[0, 0] = 1
    grid = (np.arange(3000) + 0.5) / 3000
    ups = sum(int(heat_bath_step(st, (1, 0), u, x).heights[1, 0]) for u in grid)
    p1 = ups / len(grid)
    assert abs((p1 / (1 - p1)) - float(x)) < 0.01


def test_blocked_site_unchanged():
    spec = LatticeSpec(2, 4, 4)
    st = HeightState.minimal(spec)
    st.heights[:] = [[1, 1], [1, 1]]
    for u in (0.0, 0.5, 0.999):
        assert heat_bath_step(st, (0, 1), u, 2).heights[0, 1] == 1
    with pytest.raises(IndexError):
        heat_bath_step(st, (5, 0), 0.1, 2)


def test_uniform_at_one():
    spec = LatticeSpec(1, 2, 3)
    samples = cftp_samples(spec, 1, 3000, seed=5)
    assert tv(samples, exact_law(spec, 1)) < 0.03


def test_replay_and_archive():
    spec = LatticeSpec(2, 4, 4)
    a = cftp_sample(spec, Fraction(1, 2), seed=9)
    b = cftp_sample(spec, Fraction(1, 2), seed=9)
    assert a.configuration == b.configuration and a.coalescence_T == b.coalescence_T
    buf = io.StringIO()
    write_archive([a, b], buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == lines[1]
    rec = json.loads(lines[0])
    assert rec["x"] == "1/2" and rec["spec"] == {"N": 2, "M": 4, "L": 4}
    assert len(rec["slices"]) == 5 and Fraction(rec["x"]) == Fraction(1, 2)


def test_python_and_compiled_agree():
    from fivevertex.kernels import compiled_available
    if not compiled_available():
        pytest.skip("compiled kernel not built")
    spec = LatticeSpec(3, 7, 8)
    for seed in range(5):
        a = cftp_sample(spec, Fraction(1, 2), seed, backend="python")
        b = cftp_sample(spec, Fraction(1, 2), seed, backend="cython")
        assert a.state == b.state and a.coalescence_T == b.coalescence_T


def test_degenerate_boxes():
    for spec in (LatticeSpec(0, 3, 3), LatticeSpec(2, 2, 4), LatticeSpec(2, 4, 2)):
        s = cftp_sample(spec, 2, seed=0)
        assert s.coalescence_T == 0
        s.configuration.validate(spec)


def test_timeout_diagnostics():
    spec = LatticeSpec(4, 9, 9)
    run = SamplerRun(0, Fraction(1, 2))
    with pytest.raises(SamplerTimeout) as err:
        cftp_sample(spec, Fraction(1, 2), seed=1, max_sweeps=2, run=run)
    assert err.value.diagnostics["epochs"] == [2]
    assert err.value.diagnostics["remaining_gap"] > 0


def test_monotonicity_flags():
    assert monotone_guaranteed(LatticeSpec(2, 4, 4), Fraction(1, 2))
    assert monotone_guaranteed(LatticeSpec(1, 2, 3), 2)  # c = 1
    assert not monotone_guaranteed(LatticeSpec(2, 4, 4), 2)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        cftp_sample(LatticeSpec(2, 4, 4), 2, seed=0)
    assert any(issubclass(w.category, MonotonicityWarning) for w in caught)


def test_probe_clean_where_guaranteed():
    for spec, x in [(LatticeSpec(2, 4, 4), Fraction(1, 2)), (LatticeSpec(1, 2, 3), 2),
                    (LatticeSpec(3, 6, 6), 1)]:
        assert sandwich_probe(spec, x, 3000, seed=2).violations == 0


def test_probe_reports_violations(caplog):
    rep = sandwich_probe(LatticeSpec(2, 4, 4), 2, 20000, seed=0)
    assert rep.violations > 0 and rep.examples
    assert "violations" in caplog.text
    ex = rep.examples[0]
    A, B = np.array(ex["A"]), np.array(ex["B"])
    assert np.all(A <= B)


def test_densities():
    spec = LatticeSpec(2, 4, 5)
    ferro = ferroelectric_configuration(spec)
    d = measure_vertex_densities([ferro], spec)
    grid = np.array(vertex_grid(ferro, spec))
    for k, v in enumerate(VERTEX_TYPES):
        assert np.array_equal(d.freq[:, :, k], (grid == v).astype(float))
    assert np.allclose(d.freq.sum(axis=2), 1)
    assert np.all(d.entropy() == 0)
    with pytest.raises(ValueError):
        measure_vertex_densities([], spec)
    other = cftp_sample(LatticeSpec(1, 2, 3), 1, seed=0)
    with pytest.raises(SpecError):
        measure_vertex_densities([other], spec)


def test_cell_marginals_match_enumeration():
    spec = LatticeSpec(2, 4, 4)
    x = Fraction(1, 2)
    law = exact_law(spec, x)
    n = 4000
    samples = cftp_samples(spec, x, n, seed=21)
    d = measure_vertex_densities(samples, spec)
    exact = np.zeros_like(d.freq)
    for slices, p in law.items():
        from fivevertex.model import Configuration
        g = np.array(vertex_grid(Configuration(slices), spec))
        for k, v in enumerate(VERTEX_TYPES):
            exact[:, :, k] += float(p) * (g == v)
    sigma = np.sqrt(exact * (1 - exact) / n)
    assert np.all(np.abs(d.freq - exact) <= 3 * sigma + 1e-3)


def test_components_toy():
    from fivevertex.sampler import VertexDensities
    spec = LatticeSpec(2, 6, 6)
    freq = np.zeros((6, 6, 5))
    freq[:, :, 0] = 1
    freq[0:2, :, :] = 0.2
    freq[4:6, :, :] = 0.2
    rep = disordered_components(VertexDensities(spec, freq, 1))
    assert rep.components == 2 and rep.split
    freq[2:4, :, :] = 0.2
    assert disordered_components(VertexDensities(spec, freq, 1)).components == 1
