import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavecomove import TimeSeries, align, describe, load_csv
from wavecomove.errors import (InsufficientOverlap, MissingColumn, NonNumericValue,
                               NonUniformSpacing)
from wavecomove.series import align_many, ljung_box


def monthly_csv(start_year, start_month, values, col="v"):
    lines = [f"date,{col}"]
    y, m = start_year, start_month
    for v in values:
        lines.append(f"{y:04d}-{m:02d}-01,{v}")
        m += 1
        if m == 13:
            y, m = y + 1, 1
    return "\n".join(lines).encode()


def test_load_three_monthly_rows():
    ts = load_csv(io.BytesIO(b"date,v\n2000-06-01,1\n2000-07-01,2\n2000-08-01,3"))
    np.testing.assert_array_equal(ts.values, [1.0, 2.0, 3.0])
    assert ts.dt == 1.0 and ts.unit == "month"


def test_missing_month_is_non_uniform():
    with pytest.raises(NonUniformSpacing):
        load_csv(b"date,v\n2000-01-01,1\n2000-02-01,2\n2000-04-01,3\n2000-05-01,4")


def test_non_numeric_reports_row():
    data = b"date,v\n2000-01-01,1\n2000-02-01,2\n2000-03-01,3\n2000-04-01,4\n2000-05-01,abc\n"
    with pytest.raises(NonNumericValue) as exc:
        load_csv(data)
    assert exc.value.row == 5


def test_missing_column():
    with pytest.raises(MissingColumn):
        load_csv(b"date,v\n2000-01-01,1\n2000-02-01,2", value_column="w")


def test_daily_spacing():
    ts = load_csv(b"date,v\n2020-01-01,1\n2020-01-02,2\n2020-01-03,4")
    assert ts.dt == 1.0 and ts.unit == "day"


def test_values_are_read_only():
    ts = TimeSeries.from_values([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        ts.values[0] = 5


def test_align_intersection():
    a = load_csv(monthly_csv(2000, 1, range(13)))      # 2000-01 .. 2001-01
    b = load_csv(monthly_csv(2000, 6, range(13)))      # 2000-06 .. 2001-06
    a2, b2 = align(a, b)
    assert a2.n == b2.n == 8
    np.testing.assert_array_equal(a2.values, np.arange(5, 13))
    np.testing.assert_array_equal(b2.values, np.arange(0, 8))
    np.testing.assert_array_equal(a2.timestamps, b2.timestamps)
    assert str(a2.timestamps[0])[:7] == "2000-06" and str(a2.timestamps[-1])[:7] == "2001-01"


def test_align_seven_common_months_is_too_few():
    # 2000-06 .. 2000-12 is only seven shared points, below the eight-point minimum
    a = load_csv(monthly_csv(2000, 1, range(12)))
    b = load_csv(monthly_csv(2000, 6, range(13)))
    with pytest.raises(InsufficientOverlap):
        align(a, b)


def test_align_identical_ranges_unchanged():
    a = load_csv(monthly_csv(2000, 1, range(12)))
    b = load_csv(monthly_csv(2000, 1, range(100, 112)))
    a2, b2 = align(a, b)
    np.testing.assert_array_equal(a2.values, a.values)
    np.testing.assert_array_equal(b2.values, b.values)


def test_align_disjoint():
    a = load_csv(monthly_csv(2000, 1, range(12)))
    b = load_csv(monthly_csv(2005, 1, range(12)))
    with pytest.raises(InsufficientOverlap):
        align(a, b)


def test_align_idempotent():
    a = load_csv(monthly_csv(2000, 1, range(24)))
    b = load_csv(monthly_csv(2000, 9, range(24)))
    once = align(a, b)
    twice = align(*once)
    for u, v in zip(once, twice):
        np.testing.assert_array_equal(u.values, v.values)
        np.testing.assert_array_equal(u.timestamps, v.timestamps)


def test_align_many_three():
    a = load_csv(monthly_csv(2000, 1, range(24)))
    b = load_csv(monthly_csv(2000, 3, range(24)))
    c = load_csv(monthly_csv(2000, 5, range(24)))
    out = align_many(a, b, c)
    assert {s.n for s in out} == {20}


def test_describe_arithmetic():
    s = describe(TimeSeries.from_values(np.arange(1.0, 9.0)))
    assert s.mean == 4.5 and s.min == 1 and s.max == 8
    assert not s.degenerate


def test_describe_constant_is_flagged():
    s = describe(TimeSeries.from_values([5.0] * 8))
    assert s.degenerate and s.std_dev == 0
    assert s.jarque_bera is None and s.skewness is None and s.ljung_box is None


def test_describe_normal_moments():
    x = np.random.default_rng(3).normal(size=10000)
    s = describe(TimeSeries.from_values(x))
    assert abs(s.skewness) < 0.1
    assert abs(s.excess_kurtosis) < 0.2


def test_ljung_box_lag1_formula():
    x = np.random.default_rng(4).normal(size=200)
    d = x - x.mean()
    r1 = np.sum(d[1:] * d[:-1]) / np.sum(d * d)
    n = x.size
    assert ljung_box(x, 1) == pytest.approx(n * (n + 2) * r1 ** 2 / (n - 1), rel=1e-12)


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=8, max_size=60).filter(lambda v: np.ptp(v) > 1e-3),
       st.floats(-100, 100), st.floats(0.1, 10))
def test_describe_shift_scale(values, c, k):
    x = np.asarray(values)
    base = describe(TimeSeries.from_values(x))
    shifted = describe(TimeSeries.from_values(x + c))
    scaled = describe(TimeSeries.from_values(k * x))
    assert shifted.mean - c == pytest.approx(base.mean, abs=1e-9 * (1 + abs(c)))
    assert shifted.skewness == pytest.approx(base.skewness, abs=1e-6)
    assert scaled.skewness == pytest.approx(base.skewness, abs=1e-6)
    assert scaled.excess_kurtosis == pytest.approx(base.excess_kurtosis, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.lists(finite, min_size=8, max_size=60).filter(lambda v: np.ptp(v) > 1e-3),
       st.randoms(use_true_random=False))
def test_jarque_bera_permutation_invariant(values, r):
    x = np.asarray(values)
    perm = x.copy()
    r.shuffle(perm)
    a = describe(TimeSeries.from_values(x)).jarque_bera
    b = describe(TimeSeries.from_values(perm)).jarque_bera
    assert b == pytest.approx(a, rel=1e-9, abs=1e-9)
