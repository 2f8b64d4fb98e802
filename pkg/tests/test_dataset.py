"""
Tests for dataset ingestion and splitting.
"""

import numpy as np
import pytest

from multicast_forecast.dataset import default_test_len, load_csv, save_csv, split
from multicast_forecast.errors import BadSplit, DatasetIOError, EmptySeries, ParseError, RaggedRows
from multicast_forecast.series import MultiSeries


def test_load_gas_rate_shape(tmp_path, gas_like):
    """A 2-column, 296-row file loads as d=2, n=296."""
    path = save_csv(gas_like, tmp_path / "gas.csv")
    dataset = load_csv(path)
    assert (dataset.series.n, dataset.series.d) == (296, 2)
    assert dataset.name == "gas"
    assert dataset.series.dim_names == ("dim0", "dim1")


def test_save_load_is_exact(tmp_path):
    """Values survive a save/load cycle bit for bit."""
    series = MultiSeries(np.array([[0.1, 1 / 3], [2.5e-12, -7.25]]), ("a", "b"))
    loaded = load_csv(save_csv(series, tmp_path / "x.csv")).series
    assert np.array_equal(loaded.values, series.values)


def test_crlf_and_bom(tmp_path):
    """Windows line endings and a UTF-8 BOM are accepted."""
    path = tmp_path / "win.csv"
    path.write_bytes("\ufeffa,b\r\n1.5,2\r\n3,4\r\n".encode("utf-8"))
    dataset = load_csv(path)
    assert dataset.series.dim_names == ("a", "b")
    assert dataset.series.values.tolist() == [[1.5, 2.0], [3.0, 4.0]]


def test_header_only(write_csv):
    """No data rows is an EmptySeries."""
    with pytest.raises(EmptySeries):
        load_csv(write_csv("a,b\n"))


def test_non_numeric_cell(write_csv):
    """Text in the body reports its file row and column."""
    with pytest.raises(ParseError) as exc:
        load_csv(write_csv("a,b\n1,2\nabc,3\n"))
    assert (exc.value.row, exc.value.col, exc.value.text) == (3, 1, "abc")


def test_ragged_rows(write_csv):
    """A row with extra fields is rejected."""
    with pytest.raises(RaggedRows):
        load_csv(write_csv("a,b\n1,2\n3,4,5\n"))


def test_missing_file(tmp_path):
    """A missing path is an IO error."""
    with pytest.raises(DatasetIOError):
        load_csv(tmp_path / "nope.csv")


def test_split_partitions_in_order():
    """History is the head, actual future the tail."""
    series = MultiSeries(np.arange(10.0), ("x",))
    history, future = split(series, 2)
    assert (history.n, future.n) == (8, 2)
    assert np.array_equal(history.concat(future).values, series.values)


@pytest.mark.parametrize("test_len", [0, 10, 11])
def test_bad_split(test_len):
    """test_len must lie in [1, n)."""
    with pytest.raises(BadSplit):
        split(MultiSeries(np.arange(10.0), ("x",)), test_len)


def test_default_test_len():
    """Twenty percent of the series, rounded up."""
    assert default_test_len(296) == 60
    assert default_test_len(10) == 2
