"""
Tests for the evaluation harness.
"""

import math

import numpy as np
import pytest

from multicast_forecast.config import BackendKind, BackendSelector, PipelineConfig
from multicast_forecast.dataset import Dataset, save_csv, split
from multicast_forecast.errors import EmptyInput, InvalidConfig, LengthMismatch, UnknownMethod
from multicast_forecast.evaluate import (
    METHODS,
    Method,
    MethodOutput,
    resolve_methods,
    rmse,
    run_benchmark,
    run_sweep,
    sweep_config,
)
from multicast_forecast.report import ForecastReport
from multicast_forecast.scaling import fit_scale
from multicast_forecast.series import MultiSeries

ORACLE = PipelineConfig(backend=BackendSelector(kind=BackendKind.ORACLE), num_samples=2)


def _dataset(series: MultiSeries, name: str = "synthetic") -> Dataset:
    return Dataset(name=name, series=series, source_path=f"{name}.csv")


def test_rmse_values():
    """Hand-computed reference values."""
    assert rmse([1, 2, 3], [1, 2, 4]) == pytest.approx(0.57735, abs=1e-5)
    assert rmse([0, 0], [5, 0]) == pytest.approx(3.5355, abs=1e-4)
    assert rmse([2.5], [2.5]) == 0.0


def test_rmse_is_symmetric():
    """Swapping actual and predicted gives the same score."""
    a, b = [0.3, -1.2, 4.0], [1.0, 1.0, 1.0]
    assert rmse(a, b) == rmse(b, a)


def test_rmse_errors():
    """Unequal or empty inputs are rejected."""
    with pytest.raises(LengthMismatch):
        rmse([1, 2], [1])
    with pytest.raises(EmptyInput):
        rmse([], [])


def test_persistence_on_constant_data():
    """A flat series is forecast perfectly."""
    dataset = _dataset(MultiSeries.from_columns({"a": [4.0] * 20, "b": [-1.0] * 20}))
    report = run_benchmark(dataset, resolve_methods(["persistence"]), PipelineConfig(), test_len=4)
    assert report.method("persistence").per_dim_rmse == {"a": 0.0, "b": 0.0}


def test_oracle_multicast_within_quantization(gas_like):
    """The oracle backend scores within one quantization step."""
    report = run_benchmark(_dataset(gas_like), resolve_methods(["multicast-vi"]), ORACLE)
    history, _ = split(gas_like, report.test_len)
    result = report.method("multicast-vi")
    assert result.ok
    for j, dim in enumerate(gas_like.dim_names):
        assert result.per_dim_rmse[dim] <= fit_scale(history.column(j), 3).resolution + 1e-9
    assert result.prompt_chars > 0


def test_llmtime_runs_per_dimension(gas_like):
    """The univariate protocol scores every dimension too."""
    report = run_benchmark(_dataset(gas_like), resolve_methods(["llmtime"]), ORACLE, test_len=10)
    assert set(report.method("llmtime").per_dim_rmse) == {"dim0", "dim1"}
    assert report.method("llmtime").ok


def test_report_has_method_by_dimension_cells(gas_like):
    """Every (method, dimension) pair gets a cell."""
    names = ["multicast-di", "multicast-vc", "persistence", "ar"]
    report = run_benchmark(_dataset(gas_like), resolve_methods(names), ORACLE, test_len=12)
    assert [m.name for m in report.methods] == names
    assert report.cell_count() == len(names) * gas_like.d
    assert report.test_len == 12
    assert report.config_fingerprint == ORACLE.fingerprint()


def test_failing_method_is_recorded(gas_like):
    """One broken method does not stop the others."""

    def boom(history, future, config):
        raise RuntimeError("model crashed")

    methods = [Method("broken", boom), *resolve_methods(["persistence"])]
    report = run_benchmark(_dataset(gas_like), methods, PipelineConfig(), test_len=5)

    broken = report.method("broken")
    assert not broken.ok
    assert broken.error == "RuntimeError: model crashed"
    assert broken.per_dim_rmse == {"dim0": None, "dim1": None}
    assert report.method("persistence").ok


def test_wrong_shaped_output_is_a_failure(gas_like):
    """A forecast of the wrong length counts as a failed method."""

    def short(history, future, config):
        return MethodOutput(np.zeros((future.n - 1, future.d)))

    report = run_benchmark(_dataset(gas_like), [Method("short", short)], PipelineConfig(), test_len=5)
    assert report.method("short").error.startswith("LengthMismatch")


def test_unknown_method():
    """Unknown names list the valid ones."""
    with pytest.raises(UnknownMethod) as exc:
        resolve_methods(["persistence", "lstm"])
    assert "multicast-vi" in str(exc.value)
    with pytest.raises(InvalidConfig):
        resolve_methods([])


def test_builtin_method_names():
    """The registry covers the three schemes, the univariate protocol and two baselines."""
    assert set(METHODS) == {"multicast-di", "multicast-vi", "multicast-vc", "llmtime", "persistence", "ar"}


def test_external_forecast(tmp_path, gas_like):
    """A precomputed CSV is scored like any other method."""
    history, future = split(gas_like, 6)
    path = save_csv(future, tmp_path / "lstm.csv")

    report = run_benchmark(_dataset(gas_like), resolve_methods([f"external:{path}"]), PipelineConfig(), test_len=6)

    assert report.method(f"external:{path}").per_dim_rmse == {"dim0": 0.0, "dim1": 0.0}


def test_external_forecast_too_short(tmp_path, gas_like):
    """An external forecast must cover the horizon."""
    _, future = split(gas_like, 6)
    path = save_csv(future.head(3), tmp_path / "short.csv")
    report = run_benchmark(_dataset(gas_like), resolve_methods([f"external:{path}"]), PipelineConfig(), test_len=6)
    assert report.method(f"external:{path}").error.startswith("LengthMismatch")


def test_report_json_roundtrip(gas_like):
    """Reports reload equal to what was saved."""
    report = run_benchmark(_dataset(gas_like), resolve_methods(["persistence", "ar"]), PipelineConfig(), test_len=8)
    reloaded = ForecastReport.from_json(report.to_json())
    assert reloaded == report


def test_sweep_config():
    """Each sweepable parameter lands in the right field."""
    base = PipelineConfig()
    assert sweep_config(base, "samples", 9).num_samples == 9
    assert sweep_config(base, "digits", 2).digit_budget == 2
    assert sweep_config(base, "segment-len", 4).sax.segment_length == 4
    assert sweep_config(base, "alphabet_size", 8).sax.alphabet_size == 8
    with pytest.raises(InvalidConfig):
        sweep_config(base, "temperature", 1)


def test_sweep_validates_before_running(gas_like, mocker):
    """A bad value fails the sweep before any benchmark runs."""
    spy = mocker.patch("multicast_forecast.evaluate.run_benchmark")
    with pytest.raises(InvalidConfig):
        run_sweep(_dataset(gas_like), resolve_methods(["persistence"]), PipelineConfig(), "samples", [3, 0])
    spy.assert_not_called()


def test_sweep_over_digits(gas_like):
    """One report per value; finer quantization never hurts the oracle."""
    sweep = run_sweep(_dataset(gas_like), resolve_methods(["multicast-vi"]), ORACLE, "digits", [2, 4], test_len=10)
    assert sweep.values == [2, 4]
    coarse, fine = (p.report.method("multicast-vi").per_dim_rmse for p in sweep.points)
    for dim in gas_like.dim_names:
        assert math.isfinite(coarse[dim])
        assert fine[dim] <= coarse[dim] + 1e-9
