"""
Dataset Ingestion

CSV in and out, plus the chronological train/test split. A dataset file has
one header row of dimension names and one numeric row per timestamp.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from .errors import BadSplit, DatasetIOError, EmptySeries, ParseError, RaggedRows
from .series import MultiSeries, validate

logger = logging.getLogger(__name__)

DEFAULT_TEST_FRACTION = 0.2


@dataclass(frozen=True)
class Dataset:
    name: str
    series: MultiSeries
    source_path: str


def _read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8-sig",
        )
    except FileNotFoundError as e:
        raise DatasetIOError(f"dataset not found: {path}") from e
    except OSError as e:
        raise DatasetIOError(f"cannot read {path}: {e}") from e
    except pd.errors.EmptyDataError as e:
        raise EmptySeries(f"{path} is empty (no header row)") from e
    except pd.errors.ParserError as e:
        raise RaggedRows(detail=str(e).strip()) from e


def load_csv(path: Path | str) -> Dataset:
    """Load and validate a dataset.

    Rows and columns in error messages are 1-based file positions (the
    header is line 1).

    Args:
        path: CSV file with a header of dimension names

    Returns:
        Dataset named after the file stem
    """
    path = Path(path)
    frame = _read_frame(path)

    names = [str(name).strip() for name in frame.iloc[0].tolist()]
    body = frame.iloc[1:]
    if body.empty:
        raise EmptySeries(f"{path} has a header but no data rows")

    # Short rows come back padded with NaN even with na_filter off.
    short = body.isna().any(axis=1)
    if short.any():
        raise RaggedRows(row=int(np.flatnonzero(short.to_numpy())[0]) + 2, detail=f"expected {len(names)} fields")

    columns = []
    for j in range(len(names)):
        text = body.iloc[:, j].str.strip()
        numeric = pd.to_numeric(text, errors="coerce")
        bad = numeric.isna().to_numpy() & (text.str.lower() != "nan").to_numpy()
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise ParseError(i + 2, j + 1, text.iloc[i])
        # Python float parsing is locale-independent and correctly rounded.
        try:
            columns.append(text.astype(float).to_numpy())
        except ValueError as e:
            raise ParseError(2, j + 1, str(e)) from e

    series = MultiSeries(np.column_stack(columns), tuple(names))
    validate(series)
    logger.info(f"Loaded {path.name}: {series.n} timestamps x {series.d} dimensions")
    return Dataset(name=path.stem, series=series, source_path=str(path))


def save_csv(series: MultiSeries, path: Path | str) -> Path:
    """Write a series with full float precision (reloads bit-identically)."""
    path = Path(path)
    frame = pd.DataFrame(np.asarray(series.values), columns=list(series.dim_names))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    except OSError as e:
        raise DatasetIOError(f"cannot write {path}: {e}") from e
    logger.debug(f"Wrote {series.n} rows to {path}")
    return path


def default_test_len(n: int) -> int:
    return max(1, math.ceil(DEFAULT_TEST_FRACTION * n))


def split(series: MultiSeries, test_len: int) -> tuple[MultiSeries, MultiSeries]:
    """Chronological split into (history, actual_future); no shuffling."""
    if not 1 <= test_len < series.n:
        raise BadSplit(test_len, series.n)
    return series.head(series.n - test_len), series.tail(test_len)
