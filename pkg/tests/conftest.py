"""
Shared fixtures.
"""

import numpy as np
import pytest

from multicast_forecast.series import MultiSeries


def synthetic_series(n: int, d: int) -> MultiSeries:
    """Periodic series with an integer period per dimension, so every test window stays inside the history range."""
    t = np.arange(n)
    columns = {}
    for k in range(d):
        period = 17 + 6 * k
        columns[f"dim{k}"] = 10.0 * (k + 1) + 3.0 * np.sin(2 * np.pi * t / period + k)
    return MultiSeries.from_columns(columns)


@pytest.fixture
def fig1_series():
    """The two-dimensional worked example: d1 = [1.7, 2.6], d2 = [2.3, 3.1]."""
    return MultiSeries(np.array([[1.7, 2.3], [2.6, 3.1]]), ("d1", "d2"))


@pytest.fixture
def gas_like():
    """A 2 x 296 synthetic series shaped like the Gas Rate dataset."""
    return synthetic_series(296, 2)


@pytest.fixture
def write_csv(tmp_path):
    """Write CSV text to a file under tmp_path and return its path."""

    def _write(text: str, name: str = "data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def make_series():
    """Factory for periodic n x d synthetic series."""
    return synthetic_series
