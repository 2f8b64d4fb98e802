"""
Classical Baselines

Per-dimension reference forecasters: persistence and an AR(p) fitted by
least squares.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import EmptyHistory, InvalidConfig, SingularDesign, TooShort
from .series import MultiSeries

logger = logging.getLogger(__name__)

DEFAULT_AR_ORDER = 5
RIDGE_JITTER = 1e-8


@dataclass(frozen=True)
class ArModel:
    """y_t = intercept + sum_i coefficients[i] * y_(t-1-i)"""

    order: int
    coefficients: np.ndarray
    intercept: float

    def __post_init__(self):
        coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1)
        if self.order < 1 or coefficients.size != self.order:
            raise InvalidConfig(f"AR({self.order}) needs {self.order} coefficients, got {coefficients.size}")
        if not np.all(np.isfinite(coefficients)) or not np.isfinite(self.intercept):
            raise SingularDesign("AR coefficients are not finite")
        object.__setattr__(self, "coefficients", coefficients)


def persistence_forecast(history, m: int) -> np.ndarray:
    """Repeat the last observed value m times."""
    history = np.asarray(history, dtype=float)
    if history.size == 0:
        raise EmptyHistory()
    return np.full(max(m, 0), history[-1])


def _design(history: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    # Row for target t holds [1, y_(t-1), ..., y_(t-p)].
    targets = history[p:]
    lags = np.column_stack([history[p - i : history.size - i] for i in range(1, p + 1)])
    return np.column_stack([np.ones(targets.size), lags]), targets


def ar_fit(history, p: int = DEFAULT_AR_ORDER) -> ArModel:
    """Least-squares AR(p) fit via the normal equations.

    Args:
        history: Observed values of one dimension
        p: Model order

    Returns:
        Fitted ArModel
    """
    history = np.asarray(history, dtype=float)
    if p < 1:
        raise InvalidConfig(f"AR order must be >= 1, got {p}")
    if history.size < 2 * p + 1:
        raise TooShort(f"AR({p}) needs at least {2 * p + 1} points, got {history.size}")

    design, targets = _design(history, p)
    gram = design.T @ design
    gram[np.diag_indices_from(gram)] += RIDGE_JITTER
    try:
        solution = np.linalg.solve(gram, design.T @ targets)
    except np.linalg.LinAlgError as e:
        raise SingularDesign(f"AR({p}) normal equations are singular: {e}") from e

    model = ArModel(order=p, coefficients=solution[1:], intercept=float(solution[0]))
    logger.debug(f"AR({p}) fit on {history.size} points: intercept={model.intercept:.4g}")
    return model


def ar_forecast(model: ArModel, history, m: int) -> np.ndarray:
    """Recursive multi-step prediction, feeding predictions back as lags."""
    history = np.asarray(history, dtype=float)
    if history.size < model.order:
        raise TooShort(f"AR({model.order}) forecast needs {model.order} points of history, got {history.size}")

    # Most recent value first, matching coefficient order.
    lags = list(history[::-1][: model.order])
    out = np.empty(max(m, 0))
    for step in range(out.size):
        value = model.intercept + float(np.dot(model.coefficients, lags))
        out[step] = value
        lags = [value] + lags[:-1]
    return out


def forecast_series(history: MultiSeries, m: int, method: str = "persistence", order: int = DEFAULT_AR_ORDER):
    """Apply a univariate baseline to every dimension.

    Args:
        history: Training window
        m: Horizon
        method: "persistence" or "ar"
        order: AR order when method is "ar"

    Returns:
        m x d forecast matrix
    """
    columns = []
    for j in range(history.d):
        column = history.column(j)
        if method == "persistence":
            columns.append(persistence_forecast(column, m))
        elif method == "ar":
            columns.append(ar_forecast(ar_fit(column, order), column, m))
        else:
            raise InvalidConfig(f"unknown baseline {method!r}")
    return np.column_stack(columns) if columns else np.empty((m, 0))
