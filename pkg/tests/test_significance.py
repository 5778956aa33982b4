import numpy as np
import pytest

from wavecomove import Ar1Model, TimeSeries, build_grid, coherence, coherence_significance, \
    fit_ar1, partial_coherence_significance, surrogate
from wavecomove.coherence import ridge_row
from wavecomove.errors import DegenerateSeries

from conftest import ar1


def ts(v):
    return TimeSeries.from_values(np.asarray(v, dtype=float))


def lag1(v):
    d = v - v.mean()
    return float(d[1:] @ d[:-1] / (d @ d))


def test_fit_white_noise():
    m = fit_ar1(ts(np.random.default_rng(0).normal(size=10000)))
    assert abs(m.phi) < 0.05


def test_fit_recovers_phi():
    m = fit_ar1(ts(ar1(0.7, 10000, np.random.default_rng(1))))
    assert abs(m.phi - 0.7) < 0.05


def test_fit_constant():
    with pytest.raises(DegenerateSeries):
        fit_ar1(ts(np.full(20, 3.0)))


def test_fit_clamps_negative_phi():
    alt = np.tile([1.0, -1.0], 50) + 0.01 * np.random.default_rng(2).normal(size=100)
    assert fit_ar1(ts(alt)).phi == 0.0


def test_surrogate_white():
    s = surrogate(Ar1Model(0.0, 1.0), 10000, 3)
    assert abs(lag1(s.values)) < 0.05


def test_surrogate_deterministic():
    m = Ar1Model(0.5, 1.0)
    np.testing.assert_array_equal(surrogate(m, 500, 7).values, surrogate(m, 500, 7).values)
    assert not np.array_equal(surrogate(m, 500, 7).values, surrogate(m, 500, 8).values)


def test_surrogate_stationary_variance():
    m = Ar1Model(0.9, 1.0)
    s = surrogate(m, 10000, 4)
    assert abs(s.values.var() / m.variance - 1) < 0.10


def test_ar1_model_validation():
    with pytest.raises(ValueError):
        Ar1Model(1.0, 1.0)
    with pytest.raises(ValueError):
        Ar1Model(0.5, 0.0)


@pytest.fixture(scope="module")
def pair():
    rng = np.random.default_rng(5)
    n = 256
    return ts(ar1(0.5, n, rng)), ts(ar1(0.5, n, rng)), build_grid(n)


def test_determinism(pair):
    x, y, g = pair
    a = coherence_significance(x, y, g, 0.05, 100, 11)
    b = coherence_significance(x, y, g, 0.05, 100, 11)
    np.testing.assert_array_equal(a.threshold, b.threshold)
    np.testing.assert_array_equal(a.mask, b.mask)


def test_alpha_monotone(pair):
    x, y, g = pair
    strict = coherence_significance(x, y, g, 0.01, 100, 3)
    loose = coherence_significance(x, y, g, 0.05, 100, 3)
    assert np.all(~strict.mask | loose.mask)


def test_threshold_range(pair):
    x, y, g = pair
    f = coherence_significance(x, y, g, 0.05, 100, 0)
    assert f.threshold.min() >= 0 and f.threshold.max() <= 1
    assert f.threshold.shape == (g.num_scales, x.n)


@pytest.mark.parametrize("alpha,runs", [(0.0, 100), (1.0, 100), (0.05, 10)])
def test_parameter_validation(pair, alpha, runs):
    x, y, g = pair
    with pytest.raises(ValueError):
        coherence_significance(x, y, g, alpha, runs, 0)


def test_coupled_sinusoids_significant_on_ridge():
    n = 512
    t = np.arange(n)
    rng = np.random.default_rng(6)
    x = np.sin(2 * np.pi * t / 32) + 0.3 * rng.normal(size=n)
    y = np.sin(2 * np.pi * t / 32 - 0.5) + 0.3 * rng.normal(size=n)
    g = build_grid(n)
    r = coherence(ts(x), ts(y), g)
    f = coherence_significance(ts(x), ts(y), g, 0.05, 100, 1, observed=r)
    j = ridge_row(g, 32.0)
    inside = r.reliable()[j]
    assert f.mask[j, inside].mean() > 0.95


def test_partial_significance_runs(pair):
    x, y, g = pair
    z = ts(np.random.default_rng(7).normal(size=x.n))
    f = partial_coherence_significance(x, y, z, g, 0.05, 100, 0)
    assert f.mask.shape == (g.num_scales, x.n)
    assert np.all((f.threshold >= 0) & (f.threshold <= 1))
