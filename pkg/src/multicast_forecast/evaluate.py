"""
Evaluation Harness

RMSE scoring of MultiCast, the univariate LLMTIME protocol and classical
baselines on a chronological split, plus parameter sweeps.
"""

from __future__ import annotations

import dataclasses
import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import DEFAULT_AR_ORDER, forecast_series
from .config import MuxScheme, PipelineConfig, SaxConfig
from .dataset import Dataset, default_test_len, load_csv, split
from .errors import EmptyInput, InvalidConfig, LengthMismatch, UnknownMethod
from .pipeline import ForecastPipeline
from .report import ForecastReport, MethodResult, SweepPoint, SweepReport
from .series import ForecastRequest, MultiSeries

logger = logging.getLogger(__name__)

EXTERNAL_PREFIX = "external:"


def rmse(actual, predicted) -> float:
    """sqrt(sum((y_i - yhat_i)^2) / n)"""
    actual = np.asarray(actual, dtype=float).reshape(-1)
    predicted = np.asarray(predicted, dtype=float).reshape(-1)
    if actual.size != predicted.size:
        raise LengthMismatch(actual.size, predicted.size)
    if actual.size == 0:
        raise EmptyInput("rmse of empty vectors")
    return float(np.sqrt(np.mean((actual - predicted) ** 2)))


@dataclass
class MethodOutput:
    forecast: np.ndarray
    prompt_chars: int | None = None


MethodRunner = Callable[[MultiSeries, MultiSeries, PipelineConfig], MethodOutput]


@dataclass(frozen=True)
class Method:
    name: str
    run: MethodRunner


def _multicast(scheme: MuxScheme) -> MethodRunner:
    def run(history: MultiSeries, future: MultiSeries, config: PipelineConfig) -> MethodOutput:
        config = dataclasses.replace(config, mux_scheme=scheme)
        result = ForecastPipeline().forecast(ForecastRequest(history, future.n, config), future=future)
        return MethodOutput(result.forecast, result.prompt_chars)

    return run


def _llmtime(history: MultiSeries, future: MultiSeries, config: PipelineConfig) -> MethodOutput:
    config = dataclasses.replace(config, mux_scheme=MuxScheme.VI)
    result = ForecastPipeline().forecast_per_dimension(ForecastRequest(history, future.n, config), future=future)
    return MethodOutput(result.forecast, result.prompt_chars)


def _baseline(kind: str) -> MethodRunner:
    def run(history: MultiSeries, future: MultiSeries, config: PipelineConfig) -> MethodOutput:
        return MethodOutput(forecast_series(history, future.n, kind, order=DEFAULT_AR_ORDER))

    return run


def _external(path: str) -> MethodRunner:
    def run(history: MultiSeries, future: MultiSeries, config: PipelineConfig) -> MethodOutput:
        series = load_csv(Path(path)).series
        if series.n < future.n:
            raise LengthMismatch(series.n, future.n)
        missing = [name for name in history.dim_names if name not in series.dim_names]
        if missing:
            raise InvalidConfig(f"external forecast {path} lacks dimensions: {', '.join(missing)}")
        return MethodOutput(series.select(list(history.dim_names)).head(future.n).values)

    return run


METHODS: dict[str, MethodRunner] = {
    "multicast-di": _multicast(MuxScheme.DI),
    "multicast-vi": _multicast(MuxScheme.VI),
    "multicast-vc": _multicast(MuxScheme.VC),
    "llmtime": _llmtime,
    "persistence": _baseline("persistence"),
    "ar": _baseline("ar"),
}


def resolve_methods(names: Sequence[str]) -> list[Method]:
    """Look up method names; ``external:<csv>`` plugs in a precomputed forecast."""
    methods = []
    for raw in names:
        name = raw.strip()
        if name.startswith(EXTERNAL_PREFIX) and len(name) > len(EXTERNAL_PREFIX):
            methods.append(Method(name, _external(name[len(EXTERNAL_PREFIX) :])))
        elif name in METHODS:
            methods.append(Method(name, METHODS[name]))
        else:
            raise UnknownMethod(name, list(METHODS))
    if not methods:
        raise InvalidConfig("at least one method is required")
    return methods


def _run_method(method: Method, history: MultiSeries, future: MultiSeries, config: PipelineConfig) -> MethodResult:
    start = time.perf_counter()
    try:
        output = method.run(history, future, config)
        forecast = np.asarray(output.forecast, dtype=float)
        per_dim = {name: rmse(future.column(j), forecast[:, j]) for j, name in enumerate(future.dim_names)}
    except Exception as e:
        logger.debug(f"{method.name} raised", exc_info=True)
        return MethodResult(
            name=method.name,
            per_dim_rmse={name: None for name in future.dim_names},
            seconds=time.perf_counter() - start,
            error=f"{type(e).__name__}: {e}",
        )

    return MethodResult(
        name=method.name,
        per_dim_rmse=per_dim,
        seconds=time.perf_counter() - start,
        prompt_chars=output.prompt_chars,
        predictions=forecast.tolist(),
    )


def run_benchmark(
    dataset: Dataset,
    methods: Sequence[Method],
    config: PipelineConfig,
    test_len: int | None = None,
) -> ForecastReport:
    """Forecast the held-out tail with every method and score it.

    A failing method is recorded with its error string; the run continues.

    Args:
        dataset: Loaded dataset
        methods: Methods from resolve_methods
        config: Pipeline configuration shared by the LLM-based methods
        test_len: Held-out rows (default ceil(0.2 * n))

    Returns:
        ForecastReport with |methods| x d RMSE cells
    """
    if not methods:
        raise InvalidConfig("at least one method is required")
    test_len = default_test_len(dataset.series.n) if test_len is None else test_len
    history, future = split(dataset.series, test_len)
    logger.info(
        f"Benchmark {dataset.name}: {history.n} history / {future.n} test rows, "
        f"{len(methods)} {'method' if len(methods) == 1 else 'methods'}"
    )

    report = ForecastReport(
        dataset=dataset.name,
        dim_names=list(dataset.series.dim_names),
        test_len=test_len,
        config=config.to_dict(),
        config_fingerprint=config.fingerprint(),
    )
    for method in methods:
        report.add(_run_method(method, history, future, config))
    return report


SWEEP_PARAMETERS = ("samples", "segment_len", "alphabet_size", "digits")


def sweep_config(config: PipelineConfig, parameter: str, value: int) -> PipelineConfig:
    """Copy of ``config`` with one parameter changed (SAX parameters switch SAX on)."""
    parameter = parameter.replace("-", "_")
    if parameter == "samples":
        return dataclasses.replace(config, num_samples=value)
    if parameter == "digits":
        return dataclasses.replace(config, digit_budget=value)
    sax = config.sax or SaxConfig()
    if parameter == "segment_len":
        return dataclasses.replace(config, sax=dataclasses.replace(sax, segment_length=value))
    if parameter == "alphabet_size":
        return dataclasses.replace(config, sax=dataclasses.replace(sax, alphabet_size=value))
    raise InvalidConfig(f"cannot sweep '{parameter}'; choose one of {', '.join(SWEEP_PARAMETERS)}")


def run_sweep(
    dataset: Dataset,
    methods: Sequence[Method],
    config: PipelineConfig,
    parameter: str,
    values: Sequence[int],
    test_len: int | None = None,
) -> SweepReport:
    """Repeat run_benchmark once per value of ``parameter``."""
    if not values:
        raise InvalidConfig("sweep needs at least one value")
    # Validate every point before running any of them.
    configs = [sweep_config(config, parameter, v) for v in values]

    sweep = SweepReport(dataset=dataset.name, parameter=parameter.replace("-", "_"))
    for value, point_config in zip(values, configs, strict=True):
        logger.info(f"Sweep {sweep.parameter}={value}")
        sweep.points.append(SweepPoint(value, run_benchmark(dataset, methods, point_config, test_len)))
    return sweep
