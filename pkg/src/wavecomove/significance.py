"""Monte Carlo significance of (partial) wavelet coherence against AR(1) noise.

Surrogates are drawn from ``numpy.random.Generator(Philox(...))``, a
counter-based generator. Each Monte Carlo run gets its own child stream
spawned from ``SeedSequence(seed)``, so results depend only on the seed and
the run count, not on the order in which runs are evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.signal import lfilter

from .coherence import (
    _coherency_from_coefficients,
    _partial_from_coherencies,
    coherence,
    partial_coherence,
    smooth,
)
from .cwt import ScaleGrid, _transform, coi as coi_boundary, reliable_region
from .errors import DegenerateSeries, LengthMismatch, SeriesTooShort
from .series import MIN_LENGTH, TimeSeries

BURN_IN = 100
PHI_MAX = 0.999
DEFAULT_RUNS = 300

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


@dataclass(frozen=True)
class Ar1Model:
    phi: float
    sigma: float
    mean: float = 0.0

    def __post_init__(self):
        if not -1.0 < self.phi < 1.0:
            raise ValueError(f"AR(1) coefficient must lie in (-1, 1), got {self.phi}")
        if not self.sigma > 0:
            raise ValueError(f"innovation sigma must be positive, got {self.sigma}")

    @property
    def variance(self) -> float:
        return self.sigma ** 2 / (1.0 - self.phi ** 2)


@dataclass(frozen=True, eq=False)
class SignificanceField:
    threshold: np.ndarray
    mask: np.ndarray
    alpha: float
    runs: int
    seed: int
    row_threshold: Optional[np.ndarray] = None


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def fit_ar1(x: TimeSeries) -> Ar1Model:
    """Red-noise fit: lag-1 autocorrelation clamped to [0, 0.999]."""
    v = np.asarray(getattr(x, "values", x), dtype=float)
    if v.size < MIN_LENGTH:
        raise SeriesTooShort(f"AR(1) fit needs at least {MIN_LENGTH} points")
    d = v - v.mean()
    var = float(d @ d) / v.size
    if var == 0.0:
        raise DegenerateSeries("cannot fit AR(1) to a constant series")
    phi = float(d[:-1] @ d[1:]) / (v.size * var)
    phi = min(max(phi, 0.0), PHI_MAX)
    return Ar1Model(phi=phi, sigma=float(np.sqrt(var * (1.0 - phi ** 2))), mean=float(v.mean()))


def _ar1_values(model: Ar1Model, n: int, rng: np.random.Generator, size=()) -> np.ndarray:
    eps = rng.normal(0.0, model.sigma, size=tuple(size) + (n + BURN_IN,))
    u = lfilter([1.0], [1.0, -model.phi], eps, axis=-1)
    return model.mean + u[..., BURN_IN:]


def surrogate(model: Ar1Model, n: int, rng_state: SeedLike = 0,
              dt: float = 1.0) -> TimeSeries:
    """One AR(1) realisation of length ``n``; the first 100 steps are discarded."""
    return TimeSeries.from_values(_ar1_values(model, n, make_rng(rng_state)), dt=dt)


def _check(alpha: float, runs: int) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    if runs < 100:
        raise ValueError(f"need at least 100 Monte Carlo runs, got {runs}")


def _pooled_thresholds(pool: np.ndarray, region: np.ndarray, alpha: float) -> np.ndarray:
    """Per-row (1 - alpha) quantile of surrogate values inside ``region``.

    Rows with no reliable point pool every time index of the row instead.
    """
    rows = pool.shape[1]
    out = np.empty(rows)
    for j in range(rows):
        sel = region[j] if region[j].any() else slice(None)
        vals = pool[:, j, sel].ravel()
        vals = vals[np.isfinite(vals)]
        out[j] = np.quantile(vals, 1.0 - alpha) if vals.size else np.nan
    return np.clip(out, 0.0, 1.0)


def _field(observed, rows: np.ndarray, alpha, runs, seed) -> SignificanceField:
    observed = np.asarray(getattr(observed, "magnitude", observed), dtype=float)
    threshold = np.broadcast_to(rows[:, None], observed.shape).copy()
    with np.errstate(invalid="ignore"):
        mask = np.asarray(observed > threshold)
    mask &= np.isfinite(observed)
    threshold.setflags(write=False)
    mask.setflags(write=False)
    return SignificanceField(threshold, mask, float(alpha), int(runs), int(seed), rows)


def coherence_significance(x: TimeSeries, y: TimeSeries, grid: ScaleGrid,
                           alpha: float = 0.05, runs: int = DEFAULT_RUNS, seed: int = 0,
                           observed: Optional[np.ndarray] = None) -> SignificanceField:
    """Monte Carlo test of coherence against independent AR(1) surrogates.

    Each run draws one surrogate for x and one for y from their fitted red
    noise models and computes their coherence. The surrogate magnitudes of
    each scale row, pooled over all runs and over the time points not
    affected by edge effects, give that row's (1 - alpha) threshold.
    ``mask`` marks where the observed coherence exceeds the threshold.
    """
    _check(alpha, runs)
    if x.n != y.n:
        raise LengthMismatch("series lengths differ")
    mx, my = fit_ar1(x), fit_ar1(y)
    if observed is None:
        observed = coherence(x, y, grid).magnitude
    n, dt = x.n, x.dt
    region = reliable_region(grid.scales, coi_boundary(n, dt))
    pool = np.empty((runs, grid.num_scales, n), dtype=np.float32)
    children = np.random.SeedSequence(seed).spawn(runs)
    for k, child in enumerate(children):
        rng = make_rng(child)
        sx = _ar1_values(mx, n, rng)
        sy = _ar1_values(my, n, rng)
        w = _transform(np.stack([sx, sy]), dt, grid, single=True)
        _, mag, _ = _coherency_from_coefficients(w[0], w[1], grid, dt)
        pool[k] = np.minimum(mag, 1.0)
    rows = _pooled_thresholds(pool, region, alpha)
    return _field(observed, rows, alpha, runs, seed)


def partial_coherence_significance(x: TimeSeries, y: TimeSeries, z: TimeSeries,
                                   grid: ScaleGrid, alpha: float = 0.05,
                                   runs: int = DEFAULT_RUNS, seed: int = 0,
                                   observed: Optional[np.ndarray] = None) -> SignificanceField:
    """Experimental: the same test applied to partial coherence with surrogate triples."""
    _check(alpha, runs)
    if not x.n == y.n == z.n:
        raise LengthMismatch("series lengths differ")
    models = [fit_ar1(s) for s in (x, y, z)]
    if observed is None:
        observed = partial_coherence(x, y, z, grid).magnitude
    n, dt = x.n, x.dt
    region = reliable_region(grid.scales, coi_boundary(n, dt))
    pool = np.empty((runs, grid.num_scales, n), dtype=np.float32)
    for k, child in enumerate(np.random.SeedSequence(seed).spawn(runs)):
        rng = make_rng(child)
        vals = np.stack([_ar1_values(m, n, rng) for m in models])
        wx, wy, wz = _transform(vals, dt, grid, single=True)
        sm = smooth(np.stack([wx * np.conj(wy), wx * np.conj(wz), wy * np.conj(wz)]), grid, dt)
        pw = smooth(np.stack([np.abs(a) ** 2 for a in (wx, wy, wz)]), grid, dt)
        with np.errstate(divide="ignore", invalid="ignore"):
            cxy = sm[0] / np.sqrt(pw[0] * pw[1])
            cxz = sm[1] / np.sqrt(pw[0] * pw[2])
            cyz = sm[2] / np.sqrt(pw[1] * pw[2])
        _, mag, _ = _partial_from_coherencies(cxy, cxz, cyz)
        pool[k] = np.minimum(mag, 1.0)
    rows = _pooled_thresholds(pool, region, alpha)
    return _field(observed, rows, alpha, runs, seed)
