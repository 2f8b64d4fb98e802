"""
Dimensional Multiplexing

Flattens an n x d integer matrix into one token string and parses
continuations back. Three schemes:

- DI (digit interleaving): per timestamp, digit position major, dimension
  minor. [17, 26] / [23, 31] -> "1273,2361"
- VI (value interleaving): per timestamp, whole values back to back.
  -> "1723,2631"
- VC (value concatenation): every value separated. -> "17,23,26,31"

Values are zero-padded to exactly b symbols; without a fixed width DI and VI
cannot be decoded.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import MuxScheme
from .errors import DigitOverflow, InvalidConfig, NoCompleteTimestamp

logger = logging.getLogger(__name__)

DIGITS = "0123456789"
SEPARATOR = ","


@dataclass(frozen=True)
class TokenVocabulary:
    """Ordered value symbols plus the separator (t_c)."""

    symbols: str = DIGITS
    separator: str = SEPARATOR

    def __post_init__(self):
        if len(self.separator) != 1:
            raise InvalidConfig(f"separator must be a single character, got {self.separator!r}")
        if self.separator in self.symbols:
            raise InvalidConfig(f"separator {self.separator!r} is also a value symbol")
        if len(set(self.symbols)) != len(self.symbols) or len(self.symbols) < 2:
            raise InvalidConfig(f"symbols must be at least two distinct characters, got {self.symbols!r}")

    @property
    def base(self) -> int:
        return len(self.symbols)

    @property
    def allowed_chars(self) -> frozenset[str]:
        return frozenset(self.symbols) | {self.separator}


DIGIT_VOCABULARY = TokenVocabulary()


@dataclass(frozen=True)
class MuxLayout:
    scheme: MuxScheme
    d: int
    b: int
    vocabulary: TokenVocabulary = field(default=DIGIT_VOCABULARY)

    def __post_init__(self):
        object.__setattr__(self, "scheme", MuxScheme(self.scheme))
        if self.d < 1 or self.b < 1:
            raise InvalidConfig(f"layout needs d >= 1 and b >= 1, got d={self.d}, b={self.b}")

    @property
    def max_value(self) -> int:
        return self.vocabulary.base**self.b - 1

    def chars_per_timestamp(self) -> int:
        """Characters of one timestamp, excluding the separator that follows it."""
        if self.scheme is MuxScheme.VC:
            return self.d * self.b + (self.d - 1)
        return self.d * self.b


def continuation_chars(layout: MuxLayout, timestamps: int) -> int:
    """Characters needed for ``timestamps`` steps after a trailing separator."""
    return timestamps * (layout.chars_per_timestamp() + 1)


def _render(value: int, layout: MuxLayout) -> str:
    symbols = layout.vocabulary.symbols
    if symbols == DIGITS:
        return f"{value:0{layout.b}d}"
    chars = []
    for _ in range(layout.b):
        value, digit = divmod(value, layout.vocabulary.base)
        chars.append(symbols[digit])
    return "".join(reversed(chars))


def _rendered_rows(scaled, layout: MuxLayout) -> list[list[str]]:
    scaled = np.asarray(scaled, dtype=np.int64)
    if scaled.ndim != 2 or scaled.shape[1] != layout.d:
        raise InvalidConfig(f"expected an n x {layout.d} matrix, got shape {scaled.shape}")
    over = np.argwhere((scaled < 0) | (scaled > layout.max_value))
    if over.size:
        row, col = (int(i) for i in over[0])
        raise DigitOverflow(row, col, int(scaled[row, col]))
    return [[_render(int(v), layout) for v in row] for row in scaled.tolist()]


def mux_di(scaled, layout: MuxLayout) -> str:
    """Digit interleaving: digit position major, dimension minor."""
    rows = _rendered_rows(scaled, layout)
    chunks = ["".join(value[p] for p in range(layout.b) for value in row) for row in rows]
    return layout.vocabulary.separator.join(chunks)


def mux_vi(scaled, layout: MuxLayout) -> str:
    """Value interleaving: whole values of each dimension back to back."""
    rows = _rendered_rows(scaled, layout)
    return layout.vocabulary.separator.join("".join(row) for row in rows)


def mux_vc(scaled, layout: MuxLayout) -> str:
    """Value concatenation: every value separated, timestamp major."""
    rows = _rendered_rows(scaled, layout)
    return layout.vocabulary.separator.join(value for row in rows for value in row)


_MUXERS = {
    MuxScheme.DI: mux_di,
    MuxScheme.VI: mux_vi,
    MuxScheme.VC: mux_vc,
}


def mux(scaled, layout: MuxLayout) -> str:
    return _MUXERS[layout.scheme](scaled, layout)


@lru_cache(maxsize=64)
def _symbol_index(vocabulary: TokenVocabulary) -> dict[str, int]:
    return {symbol: i for i, symbol in enumerate(vocabulary.symbols)}


def _parse_value(text: str, layout: MuxLayout) -> int | None:
    index = _symbol_index(layout.vocabulary)
    value = 0
    for char in text:
        digit = index.get(char)
        if digit is None:
            return None
        value = value * layout.vocabulary.base + digit
    return value


def demux(continuation: str, layout: MuxLayout) -> tuple[np.ndarray, int]:
    """Parse a continuation into complete timestamps.

    Parsing is greedy from the left and stops at the first malformed chunk;
    a trailing partial timestamp is dropped.

    Returns:
        (t x d integer matrix, t)

    Raises:
        NoCompleteTimestamp: not even one timestamp parsed
    """
    chunks = continuation.split(layout.vocabulary.separator)
    rows: list[list[int]] = []

    if layout.scheme is MuxScheme.VC:
        pending: list[int] = []
        for chunk in chunks:
            if len(chunk) != layout.b:
                break
            value = _parse_value(chunk, layout)
            if value is None:
                break
            pending.append(value)
            if len(pending) == layout.d:
                rows.append(pending)
                pending = []
    else:
        width = layout.d * layout.b
        for chunk in chunks:
            if len(chunk) != width:
                break
            if layout.scheme is MuxScheme.DI:
                # chunk[p * d + k] is digit p of dimension k
                values = ["".join(chunk[p * layout.d + k] for p in range(layout.b)) for k in range(layout.d)]
            else:
                values = [chunk[k * layout.b : (k + 1) * layout.b] for k in range(layout.d)]
            parsed = [_parse_value(v, layout) for v in values]
            if any(v is None for v in parsed):
                break
            rows.append([int(v) for v in parsed if v is not None])

    if not rows:
        raise NoCompleteTimestamp()

    logger.debug(f"Demultiplexed {len(rows)} timestamps from {len(continuation)} characters")
    return np.array(rows, dtype=np.int64), len(rows)


def expected_length(layout: MuxLayout, n: int) -> int:
    """Length of a multiplexed n-timestamp string (no trailing separator)."""
    if n == 0:
        return 0
    return n * layout.chars_per_timestamp() + (n - 1)

