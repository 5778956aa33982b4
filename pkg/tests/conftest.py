import numpy as np
import pytest
from scipy.signal import lfilter


def ar1(phi, n, rng, burn=200):
    e = rng.normal(size=n + burn)
    return lfilter([1.0], [1.0, -phi], e)[burn:]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
