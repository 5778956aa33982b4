"""Wavelet energy entropy and cross (Kullback-Leibler) entropy predictability measures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .dwt import DEFAULT_FILTER, DwtDecomposition, WaveletFilter, dwt_forward, make_filter
from .errors import IncompatibleLevels, ZeroEnergy

KL_EPS = 1e-12
ENERGY_FLOOR = (64 * np.finfo(float).eps) ** 2

_BASES = {"e": "e", "natural": "e", "2": "2", "two": "2"}


def _base(base) -> str:
    try:
        return _BASES[str(base).lower()]
    except KeyError:
        raise ValueError(f"exponent base must be 'e' or '2', got {base!r}") from None


def _power(base: str, x: float) -> float:
    return math.exp(x) if base == "e" else 2.0 ** x


@dataclass(frozen=True, eq=False)
class EnergyDistribution:
    e: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.e, dtype=float)
        if e.ndim != 1 or e.size == 0:
            raise ValueError("energy distribution must be a non-empty vector")
        if np.any(e < 0) or abs(e.sum() - 1.0) > 1e-12:
            raise ValueError("energy distribution must be non-negative and sum to 1")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "e", e)

    @property
    def J(self) -> int:
        return int(self.e.size)


@dataclass(frozen=True, eq=False)
class EntropyReport:
    measure_name: str
    J: int
    we: float
    we_wn: float
    measure: float
    base: str
    wn_mode: str
    filter: str
    energies: np.ndarray
    reference: Optional[np.ndarray] = None
    smoothed: bool = False

    @property
    def negative(self) -> bool:
        """True when the series looks less predictable than the white-noise reference."""
        return self.measure < 0


def energy_distribution(d: DwtDecomposition) -> EnergyDistribution:
    """Share of wavelet-coefficient energy per level; V_J is left out."""
    en = d.level_energies()
    # energies at the rounding level of the input are treated as exact zeros
    en[en <= ENERGY_FLOOR * d.energy()] = 0.0
    total = en.sum()
    if not total > 0:
        raise ZeroEnergy("all wavelet coefficients vanish (constant series?)")
    e = en / total
    # absorb rounding so the shares sum to one to the last bit we can manage
    e /= e.sum()
    return EnergyDistribution(e)


def wavelet_entropy(e: Union[EnergyDistribution, np.ndarray]) -> float:
    """Shannon entropy (nats) of an energy distribution; 0 ln 0 counts as 0."""
    p = e.e if isinstance(e, EnergyDistribution) else np.asarray(e, dtype=float)
    nz = p[p > 0]
    if nz.size and np.all(nz == nz[0]):
        # k equal shares: the entropy is ln k, no need to accumulate rounding
        return math.log(nz.size)
    we = float(-(nz * np.log(nz)).sum())
    return min(max(we, 0.0), math.log(p.size))


def _kl(ey: np.ndarray, ex: np.ndarray) -> tuple[float, bool]:
    if ey.size != ex.size:
        raise IncompatibleLevels(f"distributions have {ey.size} and {ex.size} levels")
    smoothed = bool(np.any((ex == 0) & (ey > 0)))
    if smoothed:
        ey = (ey + KL_EPS) / (1.0 + KL_EPS * ey.size)
        ex = (ex + KL_EPS) / (1.0 + KL_EPS * ex.size)
    nz = ey > 0
    val = float(np.sum(ey[nz] * (np.log(ey[nz]) - np.log(ex[nz]))))
    return max(val, 0.0), smoothed


def kl_entropy(ey: Union[EnergyDistribution, np.ndarray],
               ex: Union[EnergyDistribution, np.ndarray]) -> float:
    """Kullback-Leibler entropy of ``ey`` relative to the reference ``ex``.

    Where ``ex`` has an empty level that ``ey`` does not, both distributions
    get an additive 1e-12 on every level and are renormalised first.
    """
    a = ey.e if isinstance(ey, EnergyDistribution) else np.asarray(ey, dtype=float)
    b = ex.e if isinstance(ex, EnergyDistribution) else np.asarray(ex, dtype=float)
    return _kl(a, b)[0]


def _distribution(x, J, filt) -> EnergyDistribution:
    return energy_distribution(dwt_forward(x, J, filt))


def white_noise_entropy(x, J: int, filt: Union[str, WaveletFilter] = DEFAULT_FILTER,
                        mode: str = "analytic", runs: int = 100, seed: int = 0) -> float:
    """Reference entropy of white noise at ``J`` levels.

    ``analytic`` gives ln J. ``montecarlo`` draws ``runs`` series of the
    length of ``x`` from N(mean(x), 1) and keeps the largest entropy seen.
    """
    if mode == "analytic":
        return math.log(J)
    if mode != "montecarlo":
        raise ValueError(f"unknown white-noise mode {mode!r}")
    if runs < 1:
        raise ValueError("Monte Carlo white-noise reference needs at least one run")
    v = np.asarray(getattr(x, "values", x), dtype=float)
    rng = np.random.Generator(np.random.Philox(seed))
    noise = rng.normal(v.mean(), 1.0, size=(runs, v.size))
    best = 0.0
    for row in noise:
        best = max(best, wavelet_entropy(_distribution(row, J, filt)))
    return best


def _measure(base: str, we: float, we_wn: float, J: int, analytic: bool) -> float:
    if analytic and base == "e":
        # e**(we - ln J) == e**we / J, which keeps 1 - 1/J exact for we = 0
        return 1.0 - math.exp(we) / J
    return 1.0 - _power(base, we - we_wn)


def _mode_label(mode: str, runs: int, seed: int) -> str:
    return "analytic" if mode == "analytic" else f"montecarlo(K={runs},seed={seed})"


def weem(x, J: int, filt: Union[str, WaveletFilter] = DEFAULT_FILTER, base="e",
         wn_mode: str = "analytic", mc_runs: int = 100, seed: int = 0) -> EntropyReport:
    """Wavelet energy entropy measure 1 - B**(WE_x - WE_wn).

    Near 1 when the energy sits in few levels, near 0 when it is spread like
    white noise.
    """
    filt = make_filter(filt)
    b = _base(base)
    dist = _distribution(x, J, filt)
    we = wavelet_entropy(dist)
    we_wn = white_noise_entropy(x, J, filt, wn_mode, mc_runs, seed)
    measure = _measure(b, we, we_wn, J, wn_mode == "analytic")
    return EntropyReport("WEEM", J, we, we_wn, measure, b,
                         _mode_label(wn_mode, mc_runs, seed), filt.name, dist.e)


def cweem(x, y, J: int, filt: Union[str, WaveletFilter] = DEFAULT_FILTER, base="2",
          wn_mode: str = "analytic", mc_runs: int = 100, seed: int = 0) -> EntropyReport:
    """Cross wavelet energy entropy measure: predictability of ``y`` given ``x``.

    WE_{y|x} is the KL entropy of y's level energies relative to x's, and the
    measure is 1 - B**(WE_{y|x} - WE_wn). It is at most 1 and may be negative,
    meaning y is less predictable from x than white noise would be; see
    :attr:`EntropyReport.negative`. The Monte Carlo reference is drawn around
    the mean of ``x``.
    """
    filt = make_filter(filt)
    b = _base(base)
    vx = np.asarray(getattr(x, "values", x), dtype=float)
    vy = np.asarray(getattr(y, "values", y), dtype=float)
    if vx.size != vy.size:
        raise IncompatibleLevels("series must be aligned to the same length")
    ex = _distribution(vx, J, filt)
    ey = _distribution(vy, J, filt)
    we, smoothed = _kl(ey.e, ex.e)
    we_wn = white_noise_entropy(vx, J, filt, wn_mode, mc_runs, seed)
    measure = _measure(b, we, we_wn, J, wn_mode == "analytic")
    return EntropyReport("CWEEM", J, we, we_wn, measure, b,
                         _mode_label(wn_mode, mc_runs, seed), filt.name, ey.e,
                         reference=ex.e, smoothed=smoothed)
