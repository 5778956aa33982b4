"""Morlet continuous wavelet transform on a dyadic-fraction scale grid."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import fft as sfft

from .errors import InvalidGrid, SeriesTooShort
from .series import MIN_LENGTH, TimeSeries

PI_QUARTER = math.pi ** -0.25
SQRT2 = math.sqrt(2.0)


def morlet_time(t, omega0: float = 6.0):
    """Morlet mother wavelet in the time domain."""
    t = np.asarray(t, dtype=float)
    out = PI_QUARTER * np.exp(-0.5 * t * t) * np.exp(1j * omega0 * t)
    return out[()] if out.ndim == 0 else out


def fourier_factor(omega0: float = 6.0) -> float:
    return 4.0 * math.pi / (omega0 + math.sqrt(2.0 + omega0 * omega0))


def scale_to_fourier_period(s, omega0: float = 6.0):
    """Equivalent Fourier period of Morlet scale ``s``."""
    return fourier_factor(omega0) * np.asarray(s, dtype=float)[()]


def fourier_period_to_scale(period, omega0: float = 6.0):
    return np.asarray(period, dtype=float)[()] / fourier_factor(omega0)


@dataclass(frozen=True, eq=False)
class ScaleGrid:
    s0: float
    dj: float
    num_scales: int
    omega0: float = 6.0
    scales: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (self.s0 > 0 and math.isfinite(self.s0)):
            raise InvalidGrid(f"s0 must be positive, got {self.s0}")
        if not (self.dj > 0 and math.isfinite(self.dj)):
            raise InvalidGrid(f"dj must be positive, got {self.dj}")
        if self.num_scales < 1:
            raise InvalidGrid("grid needs at least one scale")
        if self.omega0 < 5:
            raise InvalidGrid(f"omega0 must be >= 5 for an admissible Morlet, got {self.omega0}")
        s = self.s0 * 2.0 ** (np.arange(self.num_scales) * self.dj)
        s.setflags(write=False)
        object.__setattr__(self, "scales", s)

    @property
    def periods(self) -> np.ndarray:
        return scale_to_fourier_period(self.scales, self.omega0)

    def key(self) -> tuple:
        return (float(self.s0), float(self.dj), int(self.num_scales), float(self.omega0))

    def __eq__(self, other):
        return isinstance(other, ScaleGrid) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def build_grid(n: int, dt: float = 1.0, s0: Optional[float] = None,
               dj: float = 1.0 / 12.0, omega0: float = 6.0) -> ScaleGrid:
    """Scale grid ``s0 * 2**(j*dj)`` whose largest scale stays within ``n*dt``."""
    if n < MIN_LENGTH:
        raise SeriesTooShort(f"grid needs n >= {MIN_LENGTH}, got {n}")
    if s0 is None:
        s0 = 2.0 * dt
    if not s0 > 0 or not dj > 0:
        raise InvalidGrid(f"s0 and dj must be positive (s0={s0}, dj={dj})")
    # tiny slack so exact powers of two are not lost to rounding in log2
    octaves = math.log2(n * dt / s0)
    num = int(math.floor(octaves / dj + 1e-9)) + 1
    if num < 1:
        raise InvalidGrid(f"s0={s0} exceeds the series span n*dt={n * dt}")
    return ScaleGrid(s0=float(s0), dj=float(dj), num_scales=num, omega0=float(omega0))


def coi(n: int, dt: float = 1.0) -> np.ndarray:
    """Cone-of-influence boundary scale at each time index.

    A Morlet wavelet of scale s has e-folding time sqrt(2)*s, so the boundary
    scale at index i is the distance to the nearer edge divided by sqrt(2).
    Scales above the boundary are contaminated by edge effects.
    """
    if n < 2:
        raise ValueError("coi needs n >= 2")
    i = np.arange(n)
    return dt * np.minimum(i, n - 1 - i) / SQRT2


def reliable_region(scales: np.ndarray, coi_scale: np.ndarray) -> np.ndarray:
    """Boolean (scale, time) mask of points unaffected by edge effects."""
    return np.asarray(scales)[:, None] <= np.asarray(coi_scale)[None, :]


@dataclass(frozen=True, eq=False)
class CwtField:
    coefficients: np.ndarray
    grid: ScaleGrid
    dt: float
    coi: np.ndarray

    @property
    def n(self) -> int:
        return int(self.coefficients.shape[1])

    @property
    def scales(self) -> np.ndarray:
        return self.grid.scales

    def reliable(self) -> np.ndarray:
        return reliable_region(self.grid.scales, self.coi)


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


@lru_cache(maxsize=32)
def _daughters(npad: int, dt: float, grid_key: tuple) -> np.ndarray:
    s0, dj, num, omega0 = grid_key
    scales = s0 * 2.0 ** (np.arange(num) * dj)
    omega = 2.0 * np.pi * sfft.fftfreq(npad, d=dt)
    arg = scales[:, None] * omega[None, :]
    psi = np.where(omega > 0,
                   PI_QUARTER * np.exp(-0.5 * (arg - omega0) ** 2), 0.0)
    psi *= np.sqrt(2.0 * np.pi * scales / dt)[:, None]
    psi.setflags(write=False)
    return psi


@lru_cache(maxsize=32)
def _daughters_single(npad: int, dt: float, grid_key: tuple) -> np.ndarray:
    psi = _daughters(npad, dt, grid_key).astype(np.float32)
    psi.setflags(write=False)
    return psi


def _transform(values: np.ndarray, dt: float, grid: ScaleGrid,
               single: bool = False) -> np.ndarray:
    """Wavelet coefficients for one or a stack of series (last axis = time).

    ``single=True`` runs in complex64; used for Monte Carlo surrogates only.
    """
    n = values.shape[-1]
    npad = _next_pow2(n)
    x = values - values.mean(axis=-1, keepdims=True)
    if single:
        x = x.astype(np.float32)
        psi = _daughters_single(npad, float(dt), grid.key())
    else:
        psi = _daughters(npad, float(dt), grid.key())
    xhat = sfft.fft(x, n=npad, axis=-1)
    w = sfft.ifft(xhat[..., None, :] * psi, axis=-1, workers=-1)
    return w[..., :n]


def cwt(x: TimeSeries, grid: ScaleGrid) -> CwtField:
    """Continuous wavelet transform of ``x`` computed in the Fourier domain.

    The series is de-meaned and zero padded to the next power of two. Daughter
    wavelets are scaled by sqrt(2*pi*s/dt) so that each has unit energy and
    white noise gives the same expected power at every scale.
    """
    if x.n < MIN_LENGTH:
        raise SeriesTooShort(f"series has {x.n} observations, need at least {MIN_LENGTH}")
    w = _transform(x.values, x.dt, grid)
    w.setflags(write=False)
    c = coi(x.n, x.dt)
    c.setflags(write=False)
    return CwtField(w, grid, x.dt, c)


def power(w: CwtField) -> np.ndarray:
    """Wavelet power spectrum |W|^2."""
    c = w.coefficients if isinstance(w, CwtField) else np.asarray(w)
    return c.real ** 2 + c.imag ** 2
