"""
Tests for the end-to-end forecast pipeline.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multicast_forecast.backend import GenerationBackend, MockBackend
from multicast_forecast.config import BackendKind, BackendSelector, MuxScheme, PipelineConfig, SaxConfig
from multicast_forecast.dataset import default_test_len, split
from multicast_forecast.errors import AllSamplesInvalid, EmptyInput, InvalidConfig
from multicast_forecast.pipeline import (
    ForecastPipeline,
    aggregate,
    build_prompt,
    encode_continuation,
    forecast,
    median,
)
from multicast_forecast.scaling import fit_scale
from multicast_forecast.series import ForecastRequest, MultiSeries


class FixedBackend(GenerationBackend):
    """Returns canned continuations and records the constraint it was given."""

    def __init__(self, texts):
        super().__init__()
        self.texts = texts
        self.constraints = []

    def complete(self, prompt, constraint, params, sample_index):
        self.constraints.append(constraint)
        return self.texts[sample_index % len(self.texts)]


def _oracle_config(**kwargs) -> PipelineConfig:
    return PipelineConfig(backend=BackendSelector(kind=BackendKind.ORACLE), **kwargs)


def test_prompt_ends_with_separator(fig1_series):
    """The first generated character starts a new timestamp."""
    plan = build_prompt(fig1_series, PipelineConfig(mux_scheme=MuxScheme.VI, digit_budget=2))
    assert plan.prompt.endswith(",")
    assert plan.prompt.count(",") == 2


def test_univariate_prompt_is_scheme_independent(gas_like):
    """With d=1 all three schemes render the same comma-separated values."""
    history = gas_like.select(["dim0"])
    prompts = {build_prompt(history, PipelineConfig(mux_scheme=s)).prompt for s in MuxScheme}
    assert len(prompts) == 1


@pytest.mark.parametrize("shape", [(296, 2), (242, 3), (217, 4)])
@pytest.mark.parametrize("scheme", list(MuxScheme))
def test_oracle_error_within_quantization_bound(make_series, shape, scheme):
    """Hiding the true future gives back the future to within half a step."""
    series = make_series(*shape)
    history, future = split(series, default_test_len(series.n))
    config = _oracle_config(mux_scheme=scheme, digit_budget=3, num_samples=3)

    result = ForecastPipeline().forecast(ForecastRequest(history, future.n, config), future=future)

    assert result.forecast.shape == (future.n, series.d)
    for j in range(series.d):
        bound = fit_scale(history.column(j), 3).resolution + 1e-9
        assert np.max(np.abs(result.forecast[:, j] - future.column(j))) <= bound


def test_oracle_needs_future(gas_like):
    """Without the true future there is nothing to hide."""
    with pytest.raises(InvalidConfig):
        ForecastPipeline().forecast(ForecastRequest(gas_like, 3, _oracle_config()))


@pytest.mark.parametrize(
    ("scheme", "separators", "needed", "limit"),
    [(MuxScheme.VI, 1, 15, 17), (MuxScheme.DI, 1, 15, 17), (MuxScheme.VC, 2, 18, 20)],
)
def test_constraint_counts_separators_per_timestamp(fig1_series, scheme, separators, needed, limit):
    """Value concatenation ends a timestamp after d separators, the others after one."""
    plan = build_prompt(fig1_series, PipelineConfig(mux_scheme=scheme, digit_budget=2))
    constraint = plan.constraint(3)
    assert constraint.stop_after_timestamps == 3
    assert constraint.separators_per_timestamp == separators
    assert constraint.needed_chars == needed
    assert constraint.max_chars == limit


def test_overlong_samples_are_cut_to_the_horizon():
    """Extra timestamps in a sample never reach the backend's caller."""
    history = MultiSeries(np.array([[0.0], [10.0]]), ("x",))
    config = PipelineConfig(digit_budget=2, num_samples=1)
    constraint = build_prompt(history, config).constraint(2)
    samples = FixedBackend(["40,41,42,43,"]).sample_continuations("10,", 1, constraint, config.sampling)
    assert samples == ["40,41,"]


def test_sax_horizon_asks_for_segments():
    """m=6 with w=3 requests 2 symbols per dimension and still returns 6 rows."""
    history = MultiSeries(np.sin(np.arange(60) / 3.0), ("x",))
    config = PipelineConfig(num_samples=1, sax=SaxConfig(segment_length=3, alphabet_size=5))
    backend = FixedBackend(["c,d,"])

    result = ForecastPipeline(backend=backend).forecast(ForecastRequest(history, 6, config))

    assert backend.constraints[0].stop_after_timestamps == 2
    assert result.forecast.shape == (6, 1)
    assert np.all(result.forecast[:3, 0] == result.forecast[0, 0])


def test_sax_oracle_tracks_segment_means():
    """The SAX oracle forecast stays within one quantization cell of the segment means."""
    t = np.arange(120)
    series = MultiSeries(np.sin(2 * np.pi * t / 24), ("x",))
    history, future = split(series, 24)
    config = _oracle_config(num_samples=1, sax=SaxConfig(segment_length=4, alphabet_size=10))

    result = ForecastPipeline().forecast(ForecastRequest(history, 24, config), future=future)

    std = float(history.column(0).std())
    assert result.forecast.shape == (24, 1)
    # Points sit within 0.77 of their 4-point segment mean; a=10 levels sit within 0.5 std of the PAA value.
    assert np.max(np.abs(result.forecast[:, 0] - future.column(0))) <= 0.8 + 0.5 * std


def test_single_sample_median_is_the_sample(gas_like):
    """num_samples=1 returns that sample."""
    result = forecast(ForecastRequest(gas_like, 6, PipelineConfig(num_samples=1)))
    assert result.valid_sample_count == 1
    assert np.array_equal(result.forecast, result.per_sample[0][:6])


def test_mock_runs_are_bit_identical(gas_like):
    """Mock backend + fixed seed is deterministic."""
    request = ForecastRequest(gas_like, 8, PipelineConfig(num_samples=4, mux_scheme=MuxScheme.DI))
    first = forecast(request)
    second = forecast(request)
    assert np.array_equal(first.forecast, second.forecast)
    assert first.continuations == second.continuations
    assert first.config_fingerprint == second.config_fingerprint


def test_invalid_samples_are_discarded():
    """Samples without a complete timestamp are dropped; all invalid is an error."""
    history = MultiSeries(np.array([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]), ("a", "b"))
    config = PipelineConfig(digit_budget=2, num_samples=2)

    kept = ForecastPipeline(backend=FixedBackend(["5050,", "9"])).forecast(ForecastRequest(history, 1, config))
    assert kept.valid_sample_count == 1

    with pytest.raises(AllSamplesInvalid):
        ForecastPipeline(backend=FixedBackend(["", "1"])).forecast(ForecastRequest(history, 1, config))


def test_short_samples_are_forward_filled():
    """Rows no sample reaches repeat the last aggregated row."""
    history = MultiSeries(np.array([[0.0], [10.0]]), ("x",))
    config = PipelineConfig(digit_budget=2, num_samples=1)
    result = ForecastPipeline(backend=FixedBackend(["40,"])).forecast(ForecastRequest(history, 3, config))
    assert result.forecast.shape == (3, 1)
    assert np.all(result.forecast[:, 0] == result.forecast[0, 0])


def test_aggregate_covers_cells_independently():
    """Per-cell median over covering samples, then forward fill."""
    samples = [np.array([[1.0], [2.0]]), np.array([[3.0]])]
    out = aggregate(samples, 3, fallback=np.array([9.0]))
    assert out[:, 0].tolist() == [2.0, 2.0, 2.0]
    assert aggregate([], 2, fallback=np.array([9.0]))[:, 0].tolist() == [9.0, 9.0]


def test_aggregate_is_permutation_invariant():
    """Sample order does not change the median."""
    rng = np.random.default_rng(0)
    samples = [rng.normal(size=(rng.integers(1, 6), 2)) for _ in range(7)]
    fallback = np.zeros(2)
    assert np.array_equal(aggregate(samples, 5, fallback), aggregate(samples[::-1], 5, fallback))


def test_median_examples():
    """Odd and even counts."""
    assert median([1, 3, 2]) == 2
    assert median([1, 2, 3, 10]) == 2.5
    with pytest.raises(EmptyInput):
        median([])


@given(st.lists(st.floats(min_value=-1e6, max_value=1e6), min_size=1, max_size=40))
def test_median_matches_sorting(values):
    """Median agrees with a sort-based computation."""
    ordered = sorted(values)
    k = len(ordered)
    expected = ordered[k // 2] if k % 2 else (ordered[k // 2 - 1] + ordered[k // 2]) / 2
    assert median(values) == pytest.approx(expected)


def test_encode_continuation_matches_prompt_encoding(fig1_series):
    """The oracle text uses the history's scaling and layout."""
    plan = build_prompt(fig1_series.head(1), PipelineConfig(digit_budget=2, headroom=1.0))
    text = encode_continuation(plan, fig1_series.tail(1))
    assert len(text) == 4
    assert text.isdigit()


def test_per_dimension_forecast(gas_like):
    """Each dimension is forecast as its own univariate series."""
    pipeline = ForecastPipeline(backend=MockBackend())
    request = ForecastRequest(gas_like, 5, PipelineConfig(num_samples=2))
    result = pipeline.forecast_per_dimension(request)
    assert result.forecast.shape == (5, 2)
    assert len(result.parts) == 2
    assert result.prompt_chars == sum(part.prompt_chars for part in result.parts)


def test_sax_prompt_is_shorter(gas_like):
    """SAX needs far fewer characters than three-digit values."""
    digits = build_prompt(gas_like, PipelineConfig(digit_budget=3))
    sax = build_prompt(gas_like, PipelineConfig(sax=SaxConfig()))
    assert len(sax.prompt) * 5 < len(digits.prompt)


@pytest.mark.slow
def test_elapsed_grows_about_linearly_with_samples(gas_like):
    """Doubling the sample count at most ~doubles the runtime."""

    def best_elapsed(samples: int) -> float:
        config = PipelineConfig(num_samples=samples, max_concurrency=1)
        request = ForecastRequest(gas_like, 20, config)
        runs = []
        for _ in range(3):
            start = time.perf_counter()
            forecast(request)
            runs.append(time.perf_counter() - start)
        return min(runs)

    t5, t10, t20 = best_elapsed(5), best_elapsed(10), best_elapsed(20)
    assert t10 <= 2.5 * t5
    assert t20 <= 2.5 * t10
    assert math.isfinite(t20)
