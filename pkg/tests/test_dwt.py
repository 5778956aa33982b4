import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavecomove import dwt_forward, dwt_inverse, make_filter, max_level
from wavecomove.dwt import DwtDecomposition, dwt_matrix, qmf
from wavecomove.errors import LevelTooDeep, SeriesShorterThanFilter, UnknownFilter

FILTERS = ["haar", "d4", "la8"]


def test_haar_filters():
    f = make_filter("haar")
    np.testing.assert_allclose(f.h, [0.7071067811865476, -0.7071067811865476], rtol=0, atol=1e-16)
    np.testing.assert_allclose(f.g, [0.7071067811865476, 0.7071067811865476], rtol=0, atol=1e-16)


@pytest.mark.parametrize("name", FILTERS)
def test_filter_conditions(name):
    f = make_filter(name)
    assert abs(f.h.sum()) < 1e-12
    assert f.g.sum() == pytest.approx(math.sqrt(2), abs=1e-12)
    assert f.h @ f.h == pytest.approx(1.0, abs=1e-12)
    # orthogonal to even shifts
    for k in range(2, f.L, 2):
        assert abs(f.h[k:] @ f.h[:-k]) < 1e-12


@pytest.mark.parametrize("name", FILTERS)
def test_qmf_round_trip(name):
    f = make_filter(name)
    # h_l = (-1)^l g_{L-1-l}
    np.testing.assert_array_equal(qmf(f.g), f.h)


def test_unknown_filter():
    with pytest.raises(UnknownFilter):
        make_filter("db99")


def test_max_level():
    assert max_level(237, 2) == 7
    assert max_level(237, 8) == 5
    with pytest.raises(SeriesShorterThanFilter):
        max_level(4, 8)


def test_haar_constant():
    d = dwt_forward([1.0, 1.0, 1.0, 1.0], 2, "haar")
    np.testing.assert_allclose(d.levels[0], [0, 0], atol=1e-15)
    np.testing.assert_allclose(d.levels[1], [0], atol=1e-15)
    np.testing.assert_allclose(d.final, [2.0], atol=1e-15)


def test_haar_impulse_energy():
    x = np.zeros(8)
    x[0] = 1
    d = dwt_forward(x, 3, "haar")
    total = d.level_energies().sum() + d.final @ d.final
    assert total == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("name", FILTERS)
def test_matrix_oracle(name):
    x = np.random.default_rng(0).normal(size=16)
    J = 4
    d = dwt_forward(x, J, name)
    coeffs = np.concatenate(list(d.levels) + [d.final])
    W = dwt_matrix(16, J, name)
    assert np.abs(W @ x - coeffs).max() < 1e-12


@pytest.mark.parametrize("name", FILTERS)
@pytest.mark.parametrize("N,J", [(16, 4), (32, 3), (8, 1)])
def test_matrix_orthonormal(name, N, J):
    W = dwt_matrix(N, J, name)
    assert np.abs(W.T @ W - np.eye(N)).max() < 1e-10


def test_zero_decomposition():
    d = dwt_forward(np.zeros(16), 3, "d4")
    np.testing.assert_array_equal(dwt_inverse(d), 0.0)


def test_padding_recorded():
    x = np.random.default_rng(1).normal(size=237)
    d = dwt_forward(x, 7, "haar")
    assert d.n_padded == 256 and d.padding == 19
    np.testing.assert_allclose(dwt_inverse(d), x, atol=1e-12)
    assert dwt_inverse(d, keep_padding=True).size == 256


def test_level_limits():
    x = np.arange(16.0)
    with pytest.raises(LevelTooDeep):
        dwt_forward(x, 5, "haar")
    with pytest.raises(LevelTooDeep):
        dwt_forward(x, 0, "haar")
    with pytest.raises(LevelTooDeep):
        dwt_forward(x, 3, "la8", strict=True)
    assert dwt_forward(x, 4, "la8").J == 4


def test_coefficients_read_only():
    d = dwt_forward(np.arange(16.0), 2)
    with pytest.raises(ValueError):
        d.levels[0][0] = 1


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(FILTERS), st.integers(16, 300), st.integers(1, 4), st.integers(0, 2 ** 31))
def test_round_trip_and_energy(name, n, J, seed):
    x = np.random.default_rng(seed).normal(size=n) * 10
    d = dwt_forward(x, J, name)
    rec = dwt_inverse(d)
    assert np.abs(rec - x).max() <= 1e-10 * np.abs(x).max()
    xp = dwt_inverse(d, keep_padding=True)
    e = xp @ xp
    assert abs(e - d.energy()) / e < 1e-9
