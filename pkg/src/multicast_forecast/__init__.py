"""
MultiCast Forecast

Zero-shot multivariate time series forecasting with text-completion models,
by multiplexing every dimension into a single token stream.
"""

__version__ = "0.1.0"

from .baselines import ArModel, ar_fit, ar_forecast, forecast_series, persistence_forecast
from .config import AlphabetKind, BackendKind, BackendSelector, MuxScheme, PipelineConfig, SamplingParams, SaxConfig
from .dataset import Dataset, load_csv, save_csv, split
from .evaluate import resolve_methods, rmse, run_benchmark, run_sweep
from .formatter import format_report, format_sweep
from .multiplex import MuxLayout, demux, mux
from .pipeline import ForecastPipeline, ForecastResult, build_prompt, encode_continuation, forecast, median
from .report import ForecastReport, MethodResult, SweepReport
from .series import ForecastRequest, MultiSeries
from .storage import ResultStorage

__all__ = [
    "__version__",
    "ArModel",
    "ar_fit",
    "ar_forecast",
    "forecast_series",
    "persistence_forecast",
    "AlphabetKind",
    "BackendKind",
    "BackendSelector",
    "MuxScheme",
    "PipelineConfig",
    "SamplingParams",
    "SaxConfig",
    "Dataset",
    "load_csv",
    "save_csv",
    "split",
    "resolve_methods",
    "rmse",
    "run_benchmark",
    "run_sweep",
    "format_report",
    "format_sweep",
    "MuxLayout",
    "demux",
    "mux",
    "ForecastPipeline",
    "ForecastResult",
    "build_prompt",
    "encode_continuation",
    "forecast",
    "median",
    "ForecastReport",
    "MethodResult",
    "SweepReport",
    "ForecastRequest",
    "MultiSeries",
    "ResultStorage",
]
