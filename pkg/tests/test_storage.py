"""
Tests for result storage.
"""

import json

import numpy as np

from multicast_forecast.report import ForecastReport, MethodResult, SweepPoint, SweepReport
from multicast_forecast.series import MultiSeries
from multicast_forecast.storage import ResultStorage


def _report(dataset: str = "gas") -> ForecastReport:
    report = ForecastReport(dataset=dataset, dim_names=["a", "b"], test_len=2, config_fingerprint="f00")
    report.add(MethodResult("broken", {"a": None, "b": None}, error="RuntimeError: no"))
    report.add(MethodResult("persistence", {"a": 0.1, "b": 0.2}, seconds=0.5, predictions=[[1.0, 2.0], [1.0, 2.0]]))
    return report


def test_storage_initialization(tmp_path):
    """The output directory is created on construction."""
    storage = ResultStorage(tmp_path / "out")
    assert storage.output_dir.exists()


def test_save_report(tmp_path):
    """JSON and text land in a per-dataset directory."""
    storage = ResultStorage(tmp_path)
    target = storage.save_report(_report())

    assert target == tmp_path / "gas"
    assert "Forecasting RMSE for gas" in (target / "report.txt").read_text(encoding="utf-8")
    assert json.loads((target / "report.json").read_text(encoding="utf-8"))["dataset"] == "gas"
    assert ForecastReport.load(target / "report.json") == _report()


def test_save_report_omit_timing_is_stable(tmp_path):
    """Without timing, two saves of equal reports match byte for byte."""
    first = ResultStorage(tmp_path / "one").save_report(_report(), omit_timing=True)
    slower = _report()
    slower.methods[1].seconds = 9.0
    second = ResultStorage(tmp_path / "two").save_report(slower, omit_timing=True)
    for name in ("report.json", "report.txt"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_save_sweep(tmp_path):
    """Sweeps are named after the varied parameter."""
    sweep = SweepReport(dataset="gas", parameter="digits", points=[SweepPoint(2, _report())])
    target = ResultStorage(tmp_path).save_sweep(sweep)
    assert (target / "sweep-digits.json").exists()
    assert (target / "sweep-digits.txt").exists()


def test_save_plots_one_per_dimension(tmp_path):
    """The first successful method is plotted for every dimension."""
    history = MultiSeries(np.array([[1.0, 2.0], [1.5, 2.5]]), ("a", "b"))
    future = MultiSeries(np.array([[1.2, 2.2], [1.1, 2.1]]), ("a", "b"))

    paths = ResultStorage(tmp_path).save_plots(_report(), history, future, tmp_path / "plots")

    assert [p.name for p in paths] == ["gas-a.svg", "gas-b.svg"]
    assert all(p.exists() for p in paths)


def test_save_plots_without_predictions(tmp_path):
    """Nothing is plotted when no method succeeded."""
    report = _report()
    report.methods = report.methods[:1]
    series = MultiSeries(np.zeros((2, 2)), ("a", "b"))
    assert ResultStorage(tmp_path).save_plots(report, series, series, tmp_path / "plots") == []


def test_sanitize_filename(tmp_path):
    """Path separators and spaces are replaced."""
    storage = ResultStorage(tmp_path)
    assert storage._sanitize_filename("gas rate/v2") == "gas_rate_v2"
