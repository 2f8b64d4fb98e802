"""
SAX Quantization

Piecewise Aggregate Approximation followed by symbolization against
equiprobable N(0, 1) breakpoints. One symbol replaces a whole segment of w
points, so a quantized stream needs one token per segment instead of b per
point.
"""

from __future__ import annotations

import logging
import math
import string
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import norm

from .config import MAX_DIGITAL_ALPHABET, AlphabetKind, SaxConfig
from .errors import AlphabetTooSmall, DigitalAlphabetOverflow, InvalidConfig
from .multiplex import SEPARATOR, TokenVocabulary
from .series import MultiSeries

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NormStats:
    """Per-dimension z-normalization statistics, taken from history only."""

    mean: float
    std: float


@dataclass(frozen=True)
class SaxWord:
    """Symbol indices of one dimension plus what is needed to invert them."""

    symbols: tuple[int, ...]
    stats: NormStats
    config: SaxConfig
    original_length: int

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        expected = math.ceil(self.original_length / self.config.segment_length)
        if len(self.symbols) != expected:
            raise InvalidConfig(
                f"SAX word of length {self.original_length} needs {expected} symbols, got {len(self.symbols)}"
            )
        if any(not 0 <= s < self.config.alphabet_size for s in self.symbols):
            raise InvalidConfig(f"SAX symbol outside alphabet of size {self.config.alphabet_size}")


@lru_cache(maxsize=32)
def _breakpoints(a: int) -> tuple[float, ...]:
    # Lower half from the quantile function, upper half mirrored so that
    # beta_i == -beta_(a-i) holds exactly.
    lower = [float(norm.ppf(i / a)) for i in range(1, a // 2 + 1)]
    middle = [0.0] if a % 2 == 0 else []
    if a % 2 == 0:
        lower = lower[:-1]
    return tuple(lower + middle + [-b for b in reversed(lower)])


def breakpoints(a: int) -> np.ndarray:
    """Standard normal quantiles Phi^-1(i / a) for i = 1 .. a-1."""
    if a < 2:
        raise AlphabetTooSmall(a)
    return np.array(_breakpoints(a))


@lru_cache(maxsize=32)
def _levels(a: int) -> tuple[float, ...]:
    edges = np.concatenate([[-np.inf], breakpoints(a), [np.inf]])
    density = norm.pdf(edges)
    return tuple(float(v) for v in (density[:-1] - density[1:]) * a)


def reconstruction_levels(a: int) -> np.ndarray:
    """Mean of N(0, 1) truncated to each symbol's interval."""
    if a < 2:
        raise AlphabetTooSmall(a)
    return np.array(_levels(a))


def paa(column, w: int) -> np.ndarray:
    """Segment means over windows of w points; a short tail averages what it has."""
    column = np.asarray(column, dtype=float)
    if w < 1:
        raise InvalidConfig(f"segment length must be >= 1, got {w}")
    starts = np.arange(0, column.size, w)
    sums = np.add.reduceat(column, starts) if column.size else np.empty(0)
    counts = np.minimum(starts + w, column.size) - starts
    return sums / counts


def norm_stats(column) -> NormStats:
    column = np.asarray(column, dtype=float)
    return NormStats(mean=float(column.mean()), std=float(column.std()))


def _normalize(column: np.ndarray, stats: NormStats) -> np.ndarray:
    if stats.std == 0:
        return np.zeros_like(column, dtype=float)
    return (column - stats.mean) / stats.std


def symbolize(coefficients, a: int) -> np.ndarray:
    """Symbol index = number of breakpoints <= coefficient."""
    return np.searchsorted(breakpoints(a), np.asarray(coefficients, dtype=float), side="right")


def sax_encode(series: MultiSeries, config: SaxConfig, stats: list[NormStats]) -> list[SaxWord]:
    """Quantize each dimension into a SAX word.

    Args:
        series: Values to encode (history, or a future window for oracle scoring)
        config: Segment length, alphabet size and kind
        stats: Per-dimension statistics computed on history only

    Returns:
        One SaxWord per dimension
    """
    words = []
    for j in range(series.d):
        z = _normalize(series.column(j), stats[j])
        symbols = symbolize(paa(z, config.segment_length), config.alphabet_size)
        words.append(SaxWord(tuple(symbols.tolist()), stats[j], config, series.n))
    logger.debug(f"SAX encoded {series.d} dimensions into {len(words[0].symbols) if words else 0} symbols each")
    return words


def sax_decode(word: SaxWord) -> np.ndarray:
    """Reconstruct original_length real values from a SAX word."""
    levels = reconstruction_levels(word.config.alphabet_size)
    segment_values = levels[np.asarray(word.symbols, dtype=int)] * word.stats.std + word.stats.mean
    return np.repeat(segment_values, word.config.segment_length)[: word.original_length]


def alphabet(kind: AlphabetKind, a: int) -> str:
    if kind is AlphabetKind.DIGITAL:
        if a > MAX_DIGITAL_ALPHABET:
            raise DigitalAlphabetOverflow(a)
        return string.digits[:a]
    return string.ascii_lowercase[:a]


def vocabulary(config: SaxConfig) -> TokenVocabulary:
    """Token vocabulary of a SAX stream: the first a letters or digits."""
    return TokenVocabulary(symbols=alphabet(config.alphabet_kind, config.alphabet_size), separator=SEPARATOR)


def render_symbols(word: SaxWord, kind: AlphabetKind) -> str:
    """Render a word as separator-joined letters or digits."""
    symbols = alphabet(AlphabetKind(kind), word.config.alphabet_size)
    return SEPARATOR.join(symbols[i] for i in word.symbols)
