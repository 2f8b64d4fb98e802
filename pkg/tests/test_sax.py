"""
Tests for SAX quantization.
"""

import math
from statistics import NormalDist

import numpy as np
import pytest

from multicast_forecast.config import AlphabetKind, MuxScheme, SaxConfig
from multicast_forecast.errors import AlphabetTooSmall, DigitalAlphabetOverflow, InvalidConfig
from multicast_forecast.multiplex import MuxLayout, mux
from multicast_forecast.sax import (
    NormStats,
    SaxWord,
    alphabet,
    breakpoints,
    norm_stats,
    paa,
    reconstruction_levels,
    render_symbols,
    sax_decode,
    sax_encode,
    symbolize,
    vocabulary,
)
from multicast_forecast.series import MultiSeries


def test_breakpoints_for_five_symbols():
    """Quartiles of five equiprobable intervals."""
    expected = [-0.8416, -0.2533, 0.2533, 0.8416]
    assert np.allclose(breakpoints(5), expected, atol=1e-4)


@pytest.mark.parametrize("a", range(2, 27))
def test_breakpoints_match_inverse_cdf_and_are_antisymmetric(a):
    """beta_i = Phi^-1(i/a) and beta_i == -beta_(a-i)."""
    values = breakpoints(a)
    oracle = [NormalDist().inv_cdf(i / a) for i in range(1, a)]
    assert np.allclose(values, oracle, atol=1e-9)
    assert np.allclose(values, -values[::-1], rtol=0, atol=1e-12)
    assert np.all(np.diff(values) > 0)


def test_breakpoints_need_two_symbols():
    """a < 2 has no partition."""
    with pytest.raises(AlphabetTooSmall):
        breakpoints(1)


def test_reconstruction_levels_two_symbols():
    """With a=2 the levels are the half-normal means -sqrt(2/pi) and +sqrt(2/pi)."""
    half = math.sqrt(2 / math.pi)
    assert np.allclose(reconstruction_levels(2), [-half, half])


@pytest.mark.parametrize("a", [3, 5, 10, 20])
def test_reconstruction_levels_lie_inside_their_intervals(a):
    """Each truncated mean falls within its own interval."""
    edges = np.concatenate([[-np.inf], breakpoints(a), [np.inf]])
    levels = reconstruction_levels(a)
    assert np.all(levels > edges[:-1])
    assert np.all(levels < edges[1:])
    assert abs(levels.sum()) < 1e-9


def test_paa_averages_segments_and_short_tail():
    """Segment means; the last short segment averages what it has."""
    assert paa([1, 2, 3, 4, 5], 2).tolist() == [1.5, 3.5, 5.0]


def test_symbolize_counts_breakpoints():
    """Index = number of breakpoints at or below the value."""
    assert symbolize([-2.0, -0.5, 0.0, 0.5, 2.0], 5).tolist() == [0, 1, 2, 3, 4]


def test_equiprobable_symbols():
    """Standard normal data fills every symbol about equally."""
    rng = np.random.default_rng(7)
    series = MultiSeries(rng.standard_normal(100_000), ("x",))
    config = SaxConfig(segment_length=1, alphabet_size=5)
    word = sax_encode(series, config, [NormStats(0.0, 1.0)])[0]
    counts = np.bincount(np.asarray(word.symbols), minlength=5) / 100_000
    assert np.all(np.abs(counts - 0.2) <= 0.01)


def test_encode_decode_lengths():
    """ceil(n/w) symbols in, n values out."""
    series = MultiSeries(np.arange(14.0), ("x",))
    config = SaxConfig(segment_length=4, alphabet_size=5)
    word = sax_encode(series, config, [norm_stats(series.column(0))])[0]
    assert len(word.symbols) == 4
    assert sax_decode(word).shape == (14,)


def test_constant_series_decodes_to_constant():
    """Zero variance decodes back to the mean."""
    series = MultiSeries(np.full(12, 3.5), ("x",))
    config = SaxConfig(segment_length=3, alphabet_size=4)
    word = sax_encode(series, config, [norm_stats(series.column(0))])[0]
    assert np.allclose(sax_decode(word), 3.5)


def test_decode_is_monotone_in_symbol():
    """Higher symbols reconstruct to higher values."""
    config = SaxConfig(segment_length=1, alphabet_size=6)
    word = SaxWord(tuple(range(6)), NormStats(10.0, 2.0), config, 6)
    assert np.all(np.diff(sax_decode(word)) > 0)


def test_sax_word_validation():
    """Symbol count and range are checked."""
    config = SaxConfig(segment_length=2, alphabet_size=3)
    with pytest.raises(InvalidConfig):
        SaxWord((0, 1), NormStats(0, 1), config, 6)
    with pytest.raises(InvalidConfig):
        SaxWord((0, 3), NormStats(0, 1), config, 4)


def test_alphabets():
    """Letters or digits, digits capped at ten."""
    assert alphabet(AlphabetKind.ALPHABETICAL, 5) == "abcde"
    assert alphabet(AlphabetKind.DIGITAL, 5) == "01234"
    with pytest.raises(DigitalAlphabetOverflow):
        alphabet(AlphabetKind.DIGITAL, 11)
    assert vocabulary(SaxConfig(alphabet_size=3)).allowed_chars == frozenset("abc,")


def test_render_symbols():
    """Words render as separator-joined symbols."""
    config = SaxConfig(segment_length=1, alphabet_size=5)
    word = SaxWord((0, 4, 2), NormStats(0, 1), config, 3)
    assert render_symbols(word, AlphabetKind.ALPHABETICAL) == "a,e,c"


def test_token_count_reduction():
    """296 points at b=3 cost 888 digits; SAX with w=6 needs 50 symbols."""
    rng = np.random.default_rng(3)
    series = MultiSeries(rng.normal(size=296).cumsum(), ("x",))

    ints = np.arange(296).reshape(-1, 1) % 1000
    digits = mux(ints, MuxLayout(MuxScheme.VI, 1, 3))
    assert sum(c.isdigit() for c in digits) == 888

    config = SaxConfig(segment_length=6, alphabet_size=5)
    word = sax_encode(series, config, [norm_stats(series.column(0))])[0]
    rendered = render_symbols(word, AlphabetKind.ALPHABETICAL)
    assert sum(c.isalpha() for c in rendered) == math.ceil(296 / 6) == 50
