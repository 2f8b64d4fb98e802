"""
Series Core Types

The n x d matrix every stage consumes and produces. Timestamps are implicit
(row index); missing values are rejected rather than imputed.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .config import PipelineConfig
from .errors import DuplicateDimName, EmptySeries, InvalidConfig, LengthMismatch, NonFinite, UnknownDimension


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True)
class MultiSeries:
    """An n x d real matrix with one name per dimension."""

    values: np.ndarray
    dim_names: tuple[str, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise EmptySeries(f"expected a 2-D matrix, got {values.ndim} dimensions")
        names = tuple(str(name) for name in self.dim_names)
        if values.shape[1] != len(names):
            raise LengthMismatch(values.shape[1], len(names))
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "dim_names", names)

    @classmethod
    def from_columns(cls, columns: dict[str, Sequence[float]]) -> MultiSeries:
        """Build from a name -> column mapping (columns must share a length)."""
        names = list(columns)
        lengths = {len(columns[name]) for name in names}
        if len(lengths) > 1:
            raise LengthMismatch(min(lengths), max(lengths))
        if not names:
            return cls(np.empty((0, 0)), ())
        values = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
        return cls(values, tuple(names))

    @property
    def n(self) -> int:
        return int(self.values.shape[0])

    @property
    def d(self) -> int:
        return int(self.values.shape[1])

    def _index(self, name: str) -> int:
        try:
            return self.dim_names.index(name)
        except ValueError:
            raise UnknownDimension(name, self.dim_names) from None

    def column(self, j: int | str) -> np.ndarray:
        index = self._index(j) if isinstance(j, str) else j
        return self.values[:, index]

    def select(self, names: Sequence[str]) -> MultiSeries:
        indices = [self._index(name) for name in names]
        return MultiSeries(self.values[:, indices], tuple(names))

    def head(self, k: int) -> MultiSeries:
        return MultiSeries(self.values[:k], self.dim_names)

    def tail(self, k: int) -> MultiSeries:
        return MultiSeries(self.values[self.n - k :], self.dim_names)

    def concat(self, other: MultiSeries) -> MultiSeries:
        if other.dim_names != self.dim_names:
            raise LengthMismatch(self.d, other.d)
        return MultiSeries(np.vstack([self.values, other.values]), self.dim_names)


def validate(series: MultiSeries) -> None:
    """Raise if the series violates any MultiSeries invariant.

    Raises:
        EmptySeries: zero rows or zero dimensions
        DuplicateDimName: two dimensions share a name
        NonFinite: NaN or infinity anywhere in the matrix
    """
    if series.n < 1 or series.d < 1:
        raise EmptySeries()

    seen: set[str] = set()
    for name in series.dim_names:
        if name in seen:
            raise DuplicateDimName(name)
        seen.add(name)

    bad = np.argwhere(~np.isfinite(series.values))
    if bad.size:
        row, col = (int(i) for i in bad[0])
        raise NonFinite(float(series.values[row, col]), row, col)


@dataclass(frozen=True)
class ForecastRequest:
    """Predict ``horizon`` timestamps after ``history``."""

    history: MultiSeries
    horizon: int
    config: PipelineConfig

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidConfig(f"horizon must be >= 1, got {self.horizon}")
        validate(self.history)
