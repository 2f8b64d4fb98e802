"""
Forecast Plots

One SVG line chart per dimension (history, actual future, predicted future)
with a sidecar CSV of exactly the plotted values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("agg")

from matplotlib.figure import Figure  # noqa: E402

from .errors import DatasetIOError, EmptyInput, LengthMismatch  # noqa: E402

logger = logging.getLogger(__name__)

# Fixed salt keeps SVG element ids stable between runs.
SVG_HASHSALT = "multicast-forecast"


@dataclass
class PlotData:
    """Values behind one chart; predicted/actual are NaN over the history span."""

    t: np.ndarray
    history: np.ndarray
    actual: np.ndarray
    predicted: np.ndarray


def _sidecar_path(path: Path) -> Path:
    return path.with_suffix(".csv")


def _plot_frame(history: np.ndarray, actual: np.ndarray, predicted: np.ndarray) -> pd.DataFrame:
    n, m = history.size, actual.size
    pad_future = np.full(n, np.nan)
    pad_history = np.full(m, np.nan)
    return pd.DataFrame(
        {
            "t": np.arange(n + m),
            "history": np.concatenate([history, pad_history]),
            "actual": np.concatenate([pad_future, actual]),
            "predicted": np.concatenate([pad_future, predicted]),
        }
    )


def emit_plot(actual, predicted, history, path: Path | str, title: str | None = None) -> Path:
    """Write an SVG chart plus ``<path>.csv`` with the plotted values.

    Args:
        actual: True future values of one dimension
        predicted: Forecast values, aligned with actual
        history: Values preceding the forecast window
        path: SVG destination
        title: Chart title (defaults to the file stem)

    Returns:
        Path of the written SVG
    """
    path = Path(path)
    actual = np.asarray(actual, dtype=float).reshape(-1)
    predicted = np.asarray(predicted, dtype=float).reshape(-1)
    history = np.asarray(history, dtype=float).reshape(-1)
    if actual.size == 0:
        raise EmptyInput("cannot plot an empty forecast horizon")
    if actual.size != predicted.size:
        raise LengthMismatch(actual.size, predicted.size)

    frame = _plot_frame(history, actual, predicted)

    fig = Figure(figsize=(8, 4.5))
    ax = fig.add_subplot()
    future_t = frame["t"].to_numpy()[history.size :]
    # Join the future lines to the last history point.
    anchor_t = future_t if history.size == 0 else np.concatenate([[history.size - 1], future_t])
    anchor = [] if history.size == 0 else [history[-1]]
    ax.plot(np.arange(history.size), history, label="history", color="0.4")
    ax.plot(anchor_t, np.concatenate([anchor, actual]), label="actual", color="tab:blue")
    ax.plot(anchor_t, np.concatenate([anchor, predicted]), label="predicted", color="tab:orange", linestyle="--")
    ax.set_title(title or path.stem)
    ax.set_xlabel("t")
    ax.set_ylabel("value")
    ax.legend()

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with matplotlib.rc_context({"svg.hashsalt": SVG_HASHSALT}):
            fig.savefig(path, format="svg", metadata={"Date": None})
        frame.to_csv(_sidecar_path(path), index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DatasetIOError(f"cannot write plot {path}: {e}") from e

    logger.debug(f"Plot written to {path}")
    return path


def load_plot_data(path: Path | str) -> PlotData:
    """Reload the sidecar CSV written next to an SVG."""
    sidecar = _sidecar_path(Path(path))
    try:
        frame = pd.read_csv(sidecar)
    except OSError as e:
        raise DatasetIOError(f"cannot read {sidecar}: {e}") from e
    return PlotData(
        t=frame["t"].to_numpy(),
        history=frame["history"].dropna().to_numpy(dtype=float),
        actual=frame["actual"].dropna().to_numpy(dtype=float),
        predicted=frame["predicted"].dropna().to_numpy(dtype=float),
    )
