"""
Digit Scaling

Maps each dimension between real values and fixed-width non-negative
integers with an affine transform that is recorded for exact inversion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyColumn, NonFinite, OutOfRangeInt, RangeOverflow

DEFAULT_HEADROOM = 1.25


@dataclass(frozen=True)
class ScaleParams:
    """int = round((v - offset) * factor), limited to digit_budget digits."""

    offset: float
    factor: float
    digit_budget: int

    @property
    def max_int(self) -> int:
        return 10**self.digit_budget - 1

    @property
    def resolution(self) -> float:
        """Worst-case roundtrip error for in-range values."""
        return 0.5 / self.factor


@dataclass(frozen=True)
class ScaledSeries:
    """Integer matrix plus the per-dimension parameters that produced it."""

    ints: np.ndarray
    params: tuple[ScaleParams, ...]


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Round half away from zero (numpy's rint rounds half to even)."""
    values = np.asarray(values, dtype=float)
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def fit_scale(column, digit_budget: int, headroom: float = DEFAULT_HEADROOM) -> ScaleParams:
    """Fit offset/factor so the column spans [0, (10^b - 1) / headroom].

    Args:
        column: History values of one dimension
        digit_budget: Digits per rendered value (b)
        headroom: Multiplier on the observed range left free for the forecast

    Returns:
        ScaleParams mapping every history value into [0, 10^b - 1]
    """
    column = np.asarray(column, dtype=float)
    if column.size == 0:
        raise EmptyColumn()
    bad = np.flatnonzero(~np.isfinite(column))
    if bad.size:
        raise NonFinite(float(column[bad[0]]), int(bad[0]), 0)

    low = float(column.min())
    high = float(column.max())
    span = high - low
    # The largest decodable value, low + headroom * span, must stay finite.
    if not np.isfinite(span) or not np.isfinite(low + headroom * span):
        raise RangeOverflow(low, high)
    if span == 0:
        return ScaleParams(offset=low, factor=1.0, digit_budget=digit_budget)

    with np.errstate(over="ignore"):
        factor = float(np.float64(10**digit_budget - 1) / headroom / span)
    if not np.isfinite(factor):
        # Subnormal span: every value rounds onto the offset.
        return ScaleParams(offset=low, factor=1.0, digit_budget=digit_budget)
    if factor <= 0:
        raise RangeOverflow(low, high)
    return ScaleParams(offset=low, factor=factor, digit_budget=digit_budget)


def apply_scale(column, params: ScaleParams) -> np.ndarray:
    """Scale to integers, clamping anything outside [0, 10^b - 1]."""
    with np.errstate(over="ignore", invalid="ignore"):
        shifted = (np.asarray(column, dtype=float) - params.offset) * params.factor
    scaled = round_half_away(np.nan_to_num(shifted, nan=0.0, posinf=params.max_int, neginf=0.0))
    return np.clip(scaled, 0, params.max_int).astype(np.int64)


def invert_scale(ints, params: ScaleParams) -> np.ndarray:
    """Map integers back to real values."""
    ints = np.asarray(ints, dtype=np.int64)
    outside = np.flatnonzero((ints < 0) | (ints > params.max_int))
    if outside.size:
        raise OutOfRangeInt(int(ints[outside[0]]), params.digit_budget)
    return ints / params.factor + params.offset


def scale_series(values: np.ndarray, digit_budget: int, headroom: float = DEFAULT_HEADROOM) -> ScaledSeries:
    """Fit and apply scaling column by column."""
    values = np.asarray(values, dtype=float)
    params = tuple(fit_scale(values[:, j], digit_budget, headroom) for j in range(values.shape[1]))
    ints = np.column_stack([apply_scale(values[:, j], p) for j, p in enumerate(params)])
    return ScaledSeries(ints=ints, params=params)
