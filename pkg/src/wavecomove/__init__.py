"""Wavelet co-movement (coherence, partial coherence, phase) and
wavelet-entropy predictability (WEEM, CWEEM) of time series."""

__version__ = "0.1.0"

from .coherence import (
    CoherenceResult,
    PhaseClass,
    classify_phase,
    coherence,
    partial_coherence,
    smooth,
    xwt,
)
from .cwt import (
    CwtField,
    ScaleGrid,
    build_grid,
    coi,
    cwt,
    morlet_time,
    power,
    scale_to_fourier_period,
)
from .dwt import DwtDecomposition, WaveletFilter, dwt_forward, dwt_inverse, make_filter, max_level
from .entropy import (
    EnergyDistribution,
    EntropyReport,
    cweem,
    energy_distribution,
    kl_entropy,
    wavelet_entropy,
    weem,
)
from .series import SummaryStats, TimeSeries, align, describe, load_csv
from .significance import (
    Ar1Model,
    SignificanceField,
    coherence_significance,
    fit_ar1,
    partial_coherence_significance,
    surrogate,
)
