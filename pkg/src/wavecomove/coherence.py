"""Cross-wavelet transform, wavelet coherence, phase and partial coherence."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Union

import numpy as np
from scipy import fft as sfft

from .cwt import CwtField, ScaleGrid, _transform, coi as coi_boundary, reliable_region
from .errors import (
    DegenerateSeries,
    GridMismatch,
    LengthMismatch,
    NumericalBlowup,
    OutOfRange,
    SeriesTooShort,
)
from .series import MIN_LENGTH, TimeSeries

BOXCAR_WIDTH = 0.6
GAUSS_TRUNCATE = 4.0
CLAMP_TOL = 1e-6
DEGENERATE_TOL = 1e-9


class PhaseClass(enum.Enum):
    """Sign of co-movement and lead/lag implied by a phase difference."""

    IN_PHASE_NO_LEAD = ("InPhaseNoLead", "→")
    IN_PHASE_X_LEADS = ("InPhaseXLeads", "↗")
    OUT_OF_PHASE_Y_LEADS = ("OutOfPhaseYLeads", "↖")
    IN_PHASE_Y_LEADS = ("InPhaseYLeads", "↘")
    OUT_OF_PHASE_X_LEADS = ("OutOfPhaseXLeads", "↙")

    def __init__(self, label, glyph):
        self.label = label
        self.glyph = glyph

    @property
    def in_phase(self) -> bool:
        return self.label.startswith("InPhase")

    def __str__(self):
        return self.label


_CLASS_ORDER = list(PhaseClass)


def classify_phase(theta: float, tol: float = 1e-9) -> PhaseClass:
    """Map a phase difference in [-pi, pi] to one of the five cases.

    Open intervals are closed toward the in-phase side: +-pi/2 count as
    in-phase, +pi as out of phase with y leading, -pi as out of phase with x
    leading. ``tol`` snaps values within rounding distance onto 0 and +-pi/2.
    """
    return _CLASS_ORDER[int(_phase_codes(np.asarray(theta, dtype=float), tol)[()])]


def _phase_codes(theta: np.ndarray, tol: float) -> np.ndarray:
    if np.any(~np.isfinite(theta)) or np.any(np.abs(theta) > math.pi + tol):
        raise OutOfRange("phase must lie in [-pi, pi]")
    half = math.pi / 2
    codes = np.select(
        [np.abs(theta) <= tol,
         (theta > 0) & (theta <= half + tol),
         theta > half + tol,
         (theta < 0) & (theta >= -half - tol)],
        [0, 1, 2, 3],
        default=4,
    )
    return codes


def classify_phase_field(theta: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Vectorised :func:`classify_phase`; NaN entries map to -1."""
    theta = np.asarray(theta, dtype=float)
    out = np.full(theta.shape, -1, dtype=int)
    ok = np.isfinite(theta)
    out[ok] = _phase_codes(theta[ok], tol)
    return out


def phase_class_from_code(code: int) -> PhaseClass:
    return _CLASS_ORDER[code]


@dataclass(frozen=True, eq=False)
class CoherenceResult:
    magnitude: np.ndarray
    coherency: np.ndarray
    phase: np.ndarray
    grid: ScaleGrid
    coi: np.ndarray
    dt: float = 1.0
    significance_mask: Optional[np.ndarray] = None
    degenerate: Optional[np.ndarray] = None
    kind: str = "coherence"

    def reliable(self) -> np.ndarray:
        return reliable_region(self.grid.scales, self.coi)

    def with_significance(self, mask: np.ndarray) -> "CoherenceResult":
        return dataclasses.replace(self, significance_mask=np.asarray(mask, dtype=bool))


def _check_pair(wx: CwtField, wy: CwtField) -> None:
    if wx.grid != wy.grid or wx.n != wy.n or wx.dt != wy.dt:
        raise GridMismatch("fields differ in scale grid, length or sampling interval")


def xwt(wx: CwtField, wy: CwtField) -> CwtField:
    """Cross-wavelet transform ``Wx * conj(Wy)``; its modulus is the cross power."""
    _check_pair(wx, wy)
    w = wx.coefficients * np.conj(wy.coefficients)
    w.setflags(write=False)
    return CwtField(w, wx.grid, wx.dt, wx.coi)


# -- smoothing ---------------------------------------------------------------

def boxcar_rows(dj: float) -> int:
    """Scale-smoothing window length in grid rows (nearest odd, at least 1)."""
    width = BOXCAR_WIDTH / (dj * math.log(2.0))
    k = 2 * int(math.floor((width - 1.0) / 2.0 + 0.5)) + 1
    return max(k, 1)


@lru_cache(maxsize=32)
def _time_kernels(n: int, dt: float, grid_key: tuple):
    s0, dj, num, _ = grid_key
    scales = s0 * 2.0 ** (np.arange(num) * dj)
    half = np.minimum(np.ceil(GAUSS_TRUNCATE * scales / dt), n - 1).astype(int)
    m = int(half.max())
    # circular convolution of length >= n + m leaves outputs m .. m+n-1 unaliased
    nfft = sfft.next_fast_len(n + m)
    t = np.arange(-m, m + 1)
    k = np.exp(-0.5 * (t[None, :] * dt / scales[:, None]) ** 2)
    k[np.abs(t)[None, :] > half[:, None]] = 0.0
    k /= k.sum(axis=1, keepdims=True)
    khat = sfft.fft(k, n=nfft, axis=1)
    # weight of the kernel that falls inside the series at each output index
    csum = np.concatenate([np.zeros((num, 1)), np.cumsum(k, axis=1)], axis=1)
    i = np.arange(n)
    lo = np.clip(i - (n - 1) + m, 0, 2 * m + 1)
    hi = np.clip(i + m + 1, 0, 2 * m + 1)
    weight = csum[:, hi] - csum[:, lo]
    khat.setflags(write=False)
    weight.setflags(write=False)
    return khat, weight, m, nfft


@lru_cache(maxsize=32)
def _time_kernels_single(n: int, dt: float, grid_key: tuple):
    khat, weight, m, nfft = _time_kernels(n, dt, grid_key)
    return khat.astype(np.complex64), weight.astype(np.float32), m, nfft


def _smooth_time(field: np.ndarray, dt: float, grid: ScaleGrid) -> np.ndarray:
    n = field.shape[-1]
    if field.dtype in (np.complex64, np.float32):
        khat, weight, m, nfft = _time_kernels_single(n, float(dt), grid.key())
    else:
        khat, weight, m, nfft = _time_kernels(n, float(dt), grid.key())
    if np.iscomplexobj(field):
        full = sfft.ifft(sfft.fft(field, n=nfft, axis=-1) * khat, axis=-1, workers=-1)
    else:
        full = sfft.irfft(sfft.rfft(field, n=nfft, axis=-1) * khat[:, : nfft // 2 + 1],
                          n=nfft, axis=-1, workers=-1)
    return full[..., m:m + n] / weight


def _smooth_scale(field: np.ndarray, dj: float) -> np.ndarray:
    k = boxcar_rows(dj)
    if k == 1:
        return field
    h = k // 2
    rows = field.shape[-2]
    pad = [(0, 0)] * field.ndim
    pad[-2] = (1, 0)
    csum = np.cumsum(np.pad(field, pad), axis=-2)
    j = np.arange(rows)
    lo = np.clip(j - h, 0, rows)
    hi = np.clip(j + h + 1, 0, rows)
    count = (hi - lo).astype(float)[:, None]
    return (np.take(csum, hi, axis=-2) - np.take(csum, lo, axis=-2)) / count


def smooth(field: np.ndarray, grid: ScaleGrid, dt: float = 1.0) -> np.ndarray:
    """Smooth a (scale, time) field in time, then in scale.

    Each row is convolved with a Gaussian exp(-t^2 / (2 s^2)) truncated at
    +-4 s, then each column with a boxcar 0.6 / (dj ln 2) rows wide. Both
    kernels have unit sum; near the edges the output is divided by the kernel
    weight that overlaps the field, so constants are reproduced exactly.
    Leading batch dimensions are allowed.
    """
    field = np.asarray(field)
    if field.shape[-2] != grid.num_scales:
        raise GridMismatch(
            f"field has {field.shape[-2]} scale rows, grid has {grid.num_scales}")
    return _smooth_scale(_smooth_time(field, dt, grid), grid.dj)


# -- coherence ---------------------------------------------------------------

def _coherency_from_coefficients(wx: np.ndarray, wy: np.ndarray, grid: ScaleGrid,
                                 dt: float):
    """Return (coherency, magnitude, smoothed cross spectrum) without checks."""
    px = wx.real ** 2 + wx.imag ** 2
    py = wy.real ** 2 + wy.imag ** 2
    # the kernels are real, so both power fields can ride in one complex array
    sm = smooth(np.stack([wx * np.conj(wy), px + 1j * py]), grid, dt)
    sxy = sm[0]
    denom = np.sqrt(np.clip(sm[1].real, 0.0, None) * np.clip(sm[1].imag, 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(denom > 0, sxy / np.where(denom > 0, denom, 1.0), 0.0)
    mag = np.abs(c)
    return c, mag, sxy


def _clamp(c: np.ndarray, mag: np.ndarray, tol: float = CLAMP_TOL):
    over = mag > 1.0
    if np.any(over):
        c = np.where(over, c / np.where(over, mag, 1.0), c)
        mag = np.minimum(mag, 1.0)
    return c, mag


def _check_inputs(*series: TimeSeries) -> None:
    n = series[0].n
    for s in series:
        if s.n != n:
            raise LengthMismatch(f"series lengths differ ({[t.n for t in series]})")
        if s.dt != series[0].dt:
            raise LengthMismatch("series have different sampling intervals")
    if n < MIN_LENGTH:
        raise SeriesTooShort(f"series has {n} observations, need at least {MIN_LENGTH}")
    for s in series:
        if np.ptp(s.values) == 0:
            raise DegenerateSeries(f"series {s.name!r} is constant")


def _finish(c, mag, sxy, grid, dt, n, kind="coherence") -> CoherenceResult:
    worst = float(np.nanmax(mag)) if mag.size else 0.0
    if worst > 1.0 + CLAMP_TOL:
        raise NumericalBlowup(f"coherence magnitude {worst:.9g} exceeds 1")
    c, mag = _clamp(c, mag)
    phase = np.angle(sxy)
    cb = coi_boundary(n, dt)
    for a in (mag, c, phase, cb):
        a.setflags(write=False)
    return CoherenceResult(mag, c, phase, grid, cb, dt, kind=kind)


def coherence(x: TimeSeries, y: TimeSeries, grid: ScaleGrid) -> CoherenceResult:
    """Wavelet coherence of two aligned series.

    ``magnitude`` is |S(Wxy)| / sqrt(S|Wx|^2 S|Wy|^2), ``coherency`` the same
    ratio before the modulus and ``phase`` the angle of S(Wxy) in [-pi, pi].
    Positive phase means x leads y.
    """
    _check_inputs(x, y)
    w = _transform(np.stack([x.values, y.values]), x.dt, grid)
    c, mag, sxy = _coherency_from_coefficients(w[0], w[1], grid, x.dt)
    return _finish(c, mag, sxy, grid, x.dt, x.n)


def coherence_from_fields(wx: CwtField, wy: CwtField) -> CoherenceResult:
    _check_pair(wx, wy)
    c, mag, sxy = _coherency_from_coefficients(wx.coefficients, wy.coefficients,
                                               wx.grid, wx.dt)
    return _finish(c, mag, sxy, wx.grid, wx.dt, wx.n)


def _partial_from_coherencies(cxy, cxz, cyz, form: str = "standard"):
    """Partial coherency of x and y given z; returns (complex, magnitude, degenerate)."""
    axz, ayz = np.abs(cxz), np.abs(cyz)
    czy = np.conj(cyz)
    num = cxy - cxz * czy
    if form == "standard":
        degenerate = (axz >= 1 - DEGENERATE_TOL) | (ayz >= 1 - DEGENERATE_TOL)
        den = np.sqrt(np.clip((1 - axz ** 2) * (1 - ayz ** 2), 0.0, None))
    elif form == "printed":
        axy = np.abs(cxy)
        degenerate = (axy >= 1 - DEGENERATE_TOL) | (ayz >= 1 - DEGENERATE_TOL)
        den = np.sqrt(np.clip((1 - axy ** 2) * (1 - ayz ** 2), 0.0, None))
    else:
        raise ValueError(f"unknown partial coherence form {form!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        pc = num / np.where(degenerate, 1.0, den)
    if form == "printed":
        mag = np.abs(axy - axz * ayz) / np.where(degenerate, 1.0, den)
    else:
        mag = np.abs(pc)
        # ill-conditioned points next to the degenerate set
        degenerate = degenerate | (mag > 1 + CLAMP_TOL)
    pc = np.where(degenerate, np.nan + 0j, pc)
    mag = np.where(degenerate, np.nan, mag)
    return pc, mag, degenerate


def partial_coherence(x: TimeSeries, y: TimeSeries, z: TimeSeries, grid: ScaleGrid,
                      form: str = "standard") -> CoherenceResult:
    """Coherence of x and y after removing the linear influence of z.

    The partial coherency is
    (Cxy - Cxz Czy) / sqrt((1 - |Cxz|^2)(1 - |Cyz|^2)) with complex
    coherencies C; its angle is the partial phase. Points where the control
    explains x or y completely are NaN and flagged in ``degenerate``.

    ``form="printed"`` evaluates the real-valued variant
    |Rxy - Rxz Ryz| / sqrt((1 - Rxy^2)(1 - Ryz^2)) on coherence magnitudes
    instead. It is not bounded by 1 and is offered for comparison only.
    """
    _check_inputs(x, y, z)
    w = _transform(np.stack([x.values, y.values, z.values]), x.dt, grid)
    wx, wy, wz = w
    px, py, pz = (a.real ** 2 + a.imag ** 2 for a in (wx, wy, wz))
    sm = smooth(np.stack([wx * np.conj(wy), wx * np.conj(wz), wy * np.conj(wz),
                          px.astype(complex), py.astype(complex), pz.astype(complex)]),
                grid, x.dt)
    sxx, syy, szz = (np.clip(sm[k].real, 0.0, None) for k in (3, 4, 5))
    with np.errstate(divide="ignore", invalid="ignore"):
        cxy = sm[0] / np.sqrt(sxx * syy)
        cxz = sm[1] / np.sqrt(sxx * szz)
        cyz = sm[2] / np.sqrt(syy * szz)
    pc, mag, degenerate = _partial_from_coherencies(cxy, cxz, cyz, form)
    if form == "standard":
        pc, mag = _clamp(pc, mag)
    phase = np.angle(pc)
    phase = np.where(degenerate, np.nan, phase)
    cb = coi_boundary(x.n, x.dt)
    for a in (mag, pc, phase, degenerate, cb):
        a.setflags(write=False)
    return CoherenceResult(mag, pc, phase, grid, cb, x.dt, degenerate=degenerate,
                           kind="partial" if form == "standard" else "partial-printed")


def ridge_row(grid: ScaleGrid, period: float) -> int:
    """Index of the scale whose Fourier period is closest to ``period``."""
    return int(np.argmin(np.abs(grid.periods - period)))


def circular_mean(theta: np.ndarray) -> float:
    theta = np.asarray(theta, dtype=float)
    theta = theta[np.isfinite(theta)]
    return float(np.angle(np.mean(np.exp(1j * theta))))
