"""Loading, aligning and summarising uniformly sampled series."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from datetime import date
from typing import IO, Optional, Union

import numpy as np
from scipy import stats as _stats

from .errors import (
    InsufficientOverlap,
    InvalidSeries,
    MissingColumn,
    NonNumericValue,
    NonUniformSpacing,
    SeriesTooShort,
)

MIN_LENGTH = 8
SPACING_RTOL = 1e-6


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _month_index(ts: np.ndarray) -> np.ndarray:
    return ts.astype("datetime64[M]").astype(np.int64)


def infer_step(timestamps: np.ndarray) -> tuple[float, str]:
    """Return ``(dt, unit)`` for strictly increasing, uniformly spaced stamps.

    Calendar dates whose consecutive gaps all fall in 28..31 days are read as
    monthly data with ``dt = 1.0`` month. Any other spacing must be uniform to
    within one part in a million.
    """
    ts = np.asarray(timestamps)
    if ts.size < 2:
        raise InvalidSeries("need at least two timestamps to infer the step")
    if np.issubdtype(ts.dtype, np.datetime64):
        gaps = np.diff(ts.astype("datetime64[D]").astype(np.int64)).astype(float)
        if np.any(gaps <= 0):
            raise NonUniformSpacing("timestamps must be strictly increasing")
        if np.all((gaps >= 28) & (gaps <= 31)):
            months = np.diff(_month_index(ts))
            if np.all(months == 1):
                return 1.0, "month"
            raise NonUniformSpacing("monthly dates skip or repeat a calendar month")
        unit = "day"
    else:
        gaps = np.diff(ts.astype(float))
        if np.any(gaps <= 0):
            raise NonUniformSpacing("timestamps must be strictly increasing")
        unit = "step"
    step = float(np.median(gaps))
    worst = float(np.max(np.abs(gaps - step)) / step)
    if worst > SPACING_RTOL:
        i = int(np.argmax(np.abs(gaps - step)))
        raise NonUniformSpacing(
            f"gap after index {i} deviates from the step {step:g} by {worst:.3g} (relative)"
        )
    return step, unit


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled real-valued observations.

    ``timestamps`` holds either ``datetime64[D]`` calendar dates or plain
    numeric positions. Arrays are copied and made read-only on construction.
    """

    timestamps: np.ndarray
    values: np.ndarray
    dt: float = 1.0
    unit: str = "step"
    name: str = ""

    def __post_init__(self):
        ts = np.asarray(self.timestamps)
        if np.issubdtype(ts.dtype, np.datetime64):
            ts = ts.astype("datetime64[D]")
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or ts.shape != vals.shape:
            raise InvalidSeries("timestamps and values must be 1-D and of equal length")
        if vals.size < 2:
            raise InvalidSeries("a series needs at least two observations")
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise InvalidSeries(f"non-finite value at index {bad}")
        infer_step(ts)
        if not self.dt > 0:
            raise InvalidSeries("dt must be positive")
        object.__setattr__(self, "timestamps", _frozen(ts))
        object.__setattr__(self, "values", _frozen(vals))
        object.__setattr__(self, "dt", float(self.dt))

    @classmethod
    def from_values(cls, values, dt: float = 1.0, name: str = "") -> "TimeSeries":
        """Wrap a bare array, using sample positions as timestamps."""
        vals = np.asarray(values, dtype=float)
        return cls(np.arange(vals.size, dtype=np.int64), vals, dt=dt, name=name)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.n

    def with_values(self, values, name: Optional[str] = None) -> "TimeSeries":
        return TimeSeries(self.timestamps, values, self.dt, self.unit,
                          self.name if name is None else name)


def require_length(x: TimeSeries, minimum: int = MIN_LENGTH) -> None:
    if x.n < minimum:
        raise SeriesTooShort(f"series has {x.n} observations, need at least {minimum}")


def _parse_date(text: str, row: int) -> np.datetime64:
    try:
        return np.datetime64(date.fromisoformat(text.strip()), "D")
    except ValueError:
        raise InvalidSeries(f"row {row}: {text!r} is not an ISO-8601 date") from None


def load_csv(source: Union[IO[bytes], IO[str], bytes, str],
             value_column: Optional[str] = None,
             date_column: str = "date",
             name: Optional[str] = None) -> TimeSeries:
    """Read a dated series from UTF-8 CSV text with a header row.

    ``source`` may be a binary or text stream, raw bytes, or a path. When
    ``value_column`` is omitted the file must hold exactly one column besides
    the date column. Rows are numbered from 1 for the first data row; an empty
    or unparsable value cell raises :class:`NonNumericValue` for that row.
    """
    if isinstance(source, (bytes, bytearray)):
        text = bytes(source).decode("utf-8-sig")
    elif isinstance(source, str):
        with open(source, "rb") as fh:
            text = fh.read().decode("utf-8-sig")
    else:
        raw = source.read()
        text = raw.decode("utf-8-sig") if isinstance(raw, (bytes, bytearray)) else raw

    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MissingColumn("CSV is empty") from None
    if date_column not in header:
        raise MissingColumn(f"date column {date_column!r} not in header {header}")
    if value_column is None:
        others = [h for h in header if h != date_column]
        if len(others) != 1:
            raise MissingColumn(
                f"header has {len(others)} value columns {others}; choose one explicitly")
        value_column = others[0]
    if value_column not in header:
        raise MissingColumn(f"value column {value_column!r} not in header {header}")
    di, vi = header.index(date_column), header.index(value_column)

    dates, values = [], []
    for row, fields in enumerate(reader, start=1):
        if not fields or all(not f.strip() for f in fields):
            continue
        cell = fields[vi].strip() if vi < len(fields) else ""
        try:
            v = float(cell)
        except ValueError:
            raise NonNumericValue(row, cell, value_column) from None
        if not math.isfinite(v):
            raise NonNumericValue(row, cell, value_column)
        dates.append(_parse_date(fields[di], row))
        values.append(v)

    ts = np.array(dates, dtype="datetime64[D]")
    vals = np.array(values, dtype=float)
    order = np.argsort(ts, kind="stable")
    ts, vals = ts[order], vals[order]
    if ts.size < 2:
        raise SeriesTooShort("CSV holds fewer than two observations")
    dt, unit = infer_step(ts)
    return TimeSeries(ts, vals, dt=dt, unit=unit,
                      name=value_column if name is None else name)


def align(a: TimeSeries, b: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Restrict two series to their common timestamps."""
    if np.issubdtype(a.timestamps.dtype, np.datetime64) != np.issubdtype(
            b.timestamps.dtype, np.datetime64):
        raise InsufficientOverlap("cannot align calendar dates with sample positions")
    common, ia, ib = np.intersect1d(a.timestamps, b.timestamps,
                                    assume_unique=True, return_indices=True)
    if common.size < MIN_LENGTH:
        raise InsufficientOverlap(
            f"series share {common.size} timestamps, need at least {MIN_LENGTH}")
    return (TimeSeries(common, a.values[ia], a.dt, a.unit, a.name),
            TimeSeries(common, b.values[ib], b.dt, b.unit, b.name))


def align_many(*series: TimeSeries) -> tuple[TimeSeries, ...]:
    common = series[0].timestamps
    for s in series[1:]:
        common = np.intersect1d(common, s.timestamps, assume_unique=True)
    if common.size < MIN_LENGTH:
        raise InsufficientOverlap(
            f"series share {common.size} timestamps, need at least {MIN_LENGTH}")
    out = []
    for s in series:
        _, idx, _ = np.intersect1d(s.timestamps, common, assume_unique=True,
                                   return_indices=True)
        out.append(TimeSeries(common, s.values[idx], s.dt, s.unit, s.name))
    return tuple(out)


@dataclass(frozen=True)
class SummaryStats:
    """Descriptive statistics of one series.

    For a constant series ``degenerate`` is set and the shape and dependence
    statistics are ``None`` instead of the result of a division by zero.
    """

    n: int
    mean: float
    std_dev: float
    min: float
    max: float
    skewness: Optional[float]
    excess_kurtosis: Optional[float]
    jarque_bera: Optional[float]
    jarque_bera_pvalue: Optional[float]
    ljung_box: Optional[float]
    ljung_box_pvalue: Optional[float]
    ljung_box_lag: int
    degenerate: bool = False


def ljung_box(x: np.ndarray, lag: int) -> float:
    x = np.asarray(x, dtype=float)
    n = x.size
    d = x - x.mean()
    denom = float(d @ d)
    q = 0.0
    for k in range(1, lag + 1):
        rho = float(d[:-k] @ d[k:]) / denom
        q += rho * rho / (n - k)
    return n * (n + 2) * q


def describe(x: TimeSeries, lb_lag: int = 1) -> SummaryStats:
    """Mean, spread, extremes, moment shape, Jarque-Bera and Ljung-Box.

    Skewness and kurtosis use n-denominator central moments; kurtosis is
    reported in excess of 3. ``std_dev`` is the sample (n - 1) deviation.
    """
    if lb_lag < 1:
        raise ValueError("lb_lag must be a positive integer")
    v = x.values
    n = v.size
    if n < lb_lag + 2:
        raise SeriesTooShort(f"Ljung-Box at lag {lb_lag} needs at least {lb_lag + 2} points")
    mean = float(v.mean())
    lo, hi = float(v.min()), float(v.max())
    mean = min(max(mean, lo), hi)
    d = v - mean
    m2 = float(np.mean(d * d))
    if m2 == 0.0 or hi == lo:
        return SummaryStats(n, mean, 0.0, lo, hi, None, None, None, None, None, None,
                            lb_lag, degenerate=True)
    std = float(np.std(v, ddof=1))
    skew = float(np.mean(d ** 3)) / m2 ** 1.5
    kurt = float(np.mean(d ** 4)) / m2 ** 2 - 3.0
    jb = n / 6.0 * (skew ** 2 + kurt ** 2 / 4.0)
    q = ljung_box(v, lb_lag)
    return SummaryStats(
        n=n, mean=mean, std_dev=std, min=lo, max=hi,
        skewness=skew, excess_kurtosis=kurt,
        jarque_bera=jb, jarque_bera_pvalue=float(_stats.chi2.sf(jb, 2)),
        ljung_box=q, ljung_box_pvalue=float(_stats.chi2.sf(q, lb_lag)),
        ljung_box_lag=lb_lag,
    )
