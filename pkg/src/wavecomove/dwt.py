"""Orthonormal discrete wavelet transform by the pyramid algorithm.

Filters follow the Percival & Walden conventions: the scaling filter ``g`` is
tabulated and the wavelet filter is its quadrature mirror
``h_l = (-1)**l * g[L-1-l]`` (equivalently ``g_l = (-1)**(l+1) * h[L-1-l]``).
Stage ``j`` maps V_{j-1} (length M) to

    W_{j,t} = sum_l h_l V_{j-1, (2t+1-l) mod M}
    V_{j,t} = sum_l g_l V_{j-1, (2t+1-l) mod M},   t = 0 .. M/2-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import LevelTooDeep, SeriesShorterThanFilter, UnknownFilter

_SQRT3 = math.sqrt(3.0)

SCALING_FILTERS = {
    "haar": (math.sqrt(0.5), math.sqrt(0.5)),
    "d4": tuple(c / (4 * math.sqrt(2.0)) for c in
                (1 + _SQRT3, 3 + _SQRT3, 3 - _SQRT3, 1 - _SQRT3)),
    # least asymmetric, width 8; spectral factorisation evaluated at 50 digits
    "la8": (-0.07576571478950221, -0.029635527646002493, 0.497618667632775,
            0.8037387518051321, 0.29785779560530606, -0.09921954357663353,
            -0.012603967262031304, 0.032223100604051466),
}

DEFAULT_FILTER = "la8"


def qmf(a: np.ndarray) -> np.ndarray:
    """Quadrature mirror of a filter: ``out_l = (-1)**l * a[L-1-l]``."""
    a = np.asarray(a, dtype=float)
    return a[::-1] * (-1.0) ** np.arange(a.size)


@dataclass(frozen=True, eq=False)
class WaveletFilter:
    name: str
    h: np.ndarray
    g: np.ndarray

    @property
    def L(self) -> int:
        return int(self.h.size)


def make_filter(name: Union[str, WaveletFilter] = DEFAULT_FILTER) -> WaveletFilter:
    if isinstance(name, WaveletFilter):
        return name
    key = str(name).lower()
    if key not in SCALING_FILTERS:
        raise UnknownFilter(f"unknown wavelet filter {name!r}; choose from {sorted(SCALING_FILTERS)}")
    g_tab = np.array(SCALING_FILTERS[key])
    h = qmf(g_tab)
    # scaling filter recovered from h via g_l = (-1)^(l+1) h_{L-l-1}
    L = h.size
    g = -h[::-1] * (-1.0) ** np.arange(L)
    h.setflags(write=False)
    g.setflags(write=False)
    return WaveletFilter(key, h, g)


def max_level(n: int, L: int) -> int:
    """Deepest level allowed for ``n`` samples and a width-``L`` filter."""
    if n < L:
        raise SeriesShorterThanFilter(f"series of length {n} is shorter than the filter width {L}")
    return int(math.floor(math.log2((n - 1) / (L - 1) + 1)))


@dataclass(frozen=True, eq=False)
class DwtDecomposition:
    levels: tuple
    final: np.ndarray
    filter: WaveletFilter
    n_original: int
    padding: int = 0
    padding_method: str = "symmetric"

    @property
    def J(self) -> int:
        return len(self.levels)

    @property
    def n_padded(self) -> int:
        return self.n_original + self.padding

    def level_energies(self) -> np.ndarray:
        return np.array([float(w @ w) for w in self.levels])

    def energy(self) -> float:
        return float(self.level_energies().sum() + self.final @ self.final)


def _stage_index(m: int, L: int) -> np.ndarray:
    t = np.arange(m // 2)[:, None]
    l = np.arange(L)[None, :]
    return (2 * t + 1 - l) % m


def pyramid_stage(v: np.ndarray, filt: WaveletFilter) -> tuple[np.ndarray, np.ndarray]:
    """One pass of the pyramid: split V_{j-1} into (W_j, V_j)."""
    m = v.size
    if m % 2:
        raise ValueError("pyramid stage needs an even-length input")
    taps = v[_stage_index(m, filt.L)]
    return taps @ filt.h, taps @ filt.g


def pyramid_inverse_stage(w: np.ndarray, v: np.ndarray, filt: WaveletFilter) -> np.ndarray:
    m = 2 * w.size
    out = np.zeros(m)
    np.add.at(out, _stage_index(m, filt.L), w[:, None] * filt.h + v[:, None] * filt.g)
    return out


def padded_length(n: int, J: int) -> int:
    block = 1 << J
    return -(-n // block) * block


def dwt_forward(x, J: int, filt: Union[str, WaveletFilter] = DEFAULT_FILTER,
                strict: bool = False) -> DwtDecomposition:
    """Decompose ``x`` into wavelet vectors W_1..W_J and the scaling vector V_J.

    The series is extended by symmetric reflection to the next multiple of
    2**J; the number of added samples is kept in ``padding``. Circular
    filtering keeps every stage well defined down to a single coefficient, so
    by default J only needs 2**J <= len(x). ``strict=True`` applies
    the tighter :func:`max_level` bound instead, which keeps the deepest
    stage at least as long as the filter.
    """
    filt = make_filter(filt)
    v = np.asarray(getattr(x, "values", x), dtype=float).ravel()
    n = v.size
    if J < 1:
        raise LevelTooDeep(f"level must be at least 1, got {J}")
    if n < 2:
        raise SeriesShorterThanFilter("need at least two samples")
    npad = padded_length(n, J)
    limit = max_level(npad, filt.L) if strict else n.bit_length() - 1
    if J > limit:
        raise LevelTooDeep(
            f"level {J} exceeds the maximum {limit} for {npad} samples and filter {filt.name}")
    pad = npad - n
    if pad:
        v = np.pad(v, (0, pad), mode="symmetric")
    levels = []
    for _ in range(J):
        w, v = pyramid_stage(v, filt)
        w.setflags(write=False)
        levels.append(w)
    v.setflags(write=False)
    return DwtDecomposition(tuple(levels), v, filt, n, pad)


def dwt_inverse(d: DwtDecomposition, keep_padding: bool = False) -> np.ndarray:
    """Invert :func:`dwt_forward`; padding is stripped unless ``keep_padding``."""
    v = np.asarray(d.final, dtype=float)
    for w in reversed(d.levels):
        v = pyramid_inverse_stage(np.asarray(w, dtype=float), v, d.filter)
    return v if keep_padding else v[: d.n_original]


def dwt_matrix(N: int, J: int, filt: Union[str, WaveletFilter] = DEFAULT_FILTER) -> np.ndarray:
    """Assemble the N x N transform matrix [W_1; ...; W_J; V_J] explicitly.

    Built from dense per-stage filter matrices with plain loops; used as a
    brute-force check of the pyramid.
    """
    filt = make_filter(filt)
    if N % (1 << J):
        raise ValueError("N must be a multiple of 2**J")
    blocks = []
    upstream = np.eye(N)
    m = N
    for _ in range(J):
        B = np.zeros((m // 2, m))
        A = np.zeros((m // 2, m))
        for t in range(m // 2):
            for l in range(filt.L):
                col = (2 * t + 1 - l) % m
                B[t, col] += filt.h[l]
                A[t, col] += filt.g[l]
        blocks.append(B @ upstream)
        upstream = A @ upstream
        m //= 2
    blocks.append(upstream)
    return np.vstack(blocks)
