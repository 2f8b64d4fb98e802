"""
Forecast Pipeline - Main Orchestrator

scale (or SAX-quantize) -> multiplex -> sample -> demultiplex -> invert ->
median-aggregate. The prompt always ends with a separator so the first
generated character starts a new timestamp.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .backend import GenerationBackend, GenerationConstraint, OracleBackend, create_backend
from .config import BackendKind, PipelineConfig, SaxConfig
from .errors import AllSamplesInvalid, EmptyInput, InvalidConfig, NoCompleteTimestamp
from .multiplex import MuxLayout, MuxScheme, continuation_chars, demux, mux
from .sax import NormStats, SaxWord, norm_stats, sax_decode, sax_encode, vocabulary
from .scaling import ScaleParams, apply_scale, fit_scale, invert_scale
from .series import ForecastRequest, MultiSeries

logger = logging.getLogger(__name__)

# Type alias for progress callback
ProgressCallback = Callable[[str, dict], None]

MAX_CHARS_SLACK = 0.10


class Codec(Protocol):
    """Maps real values to the integer symbols that get multiplexed, and back."""

    def encode(self, series: MultiSeries) -> np.ndarray: ...

    def decode(self, ints: np.ndarray, horizon: int) -> np.ndarray: ...

    def steps_for(self, horizon: int) -> int: ...


@dataclass(frozen=True)
class DigitCodec:
    params: tuple[ScaleParams, ...]

    def encode(self, series: MultiSeries) -> np.ndarray:
        return np.column_stack([apply_scale(series.column(j), p) for j, p in enumerate(self.params)])

    def decode(self, ints: np.ndarray, horizon: int) -> np.ndarray:
        ints = ints[:horizon]
        return np.column_stack([invert_scale(ints[:, j], p) for j, p in enumerate(self.params)])

    def steps_for(self, horizon: int) -> int:
        return horizon


@dataclass(frozen=True)
class SaxCodec:
    config: SaxConfig
    stats: tuple[NormStats, ...]

    def encode(self, series: MultiSeries) -> np.ndarray:
        words = sax_encode(series, self.config, list(self.stats))
        return np.column_stack([np.asarray(w.symbols, dtype=np.int64) for w in words])

    def decode(self, ints: np.ndarray, horizon: int) -> np.ndarray:
        ints = ints[: self.steps_for(horizon)]
        length = min(ints.shape[0] * self.config.segment_length, horizon)
        columns = [
            sax_decode(SaxWord(tuple(ints[:, j].tolist()), stats, self.config, length))
            for j, stats in enumerate(self.stats)
        ]
        return np.column_stack(columns)

    def steps_for(self, horizon: int) -> int:
        return math.ceil(horizon / self.config.segment_length)


@dataclass(frozen=True)
class PromptPlan:
    """Everything derived from history before any sampling happens."""

    prompt: str
    layout: MuxLayout
    codec: DigitCodec | SaxCodec
    encoded_history: np.ndarray

    def constraint(self, horizon: int) -> GenerationConstraint:
        steps = self.codec.steps_for(horizon)
        needed = continuation_chars(self.layout, steps)
        return GenerationConstraint(
            allowed_chars=self.layout.vocabulary.allowed_chars,
            max_chars=math.ceil(needed * (1 + MAX_CHARS_SLACK)),
            stop_after_timestamps=steps,
            separator=self.layout.vocabulary.separator,
            separators_per_timestamp=self.layout.d if self.layout.scheme is MuxScheme.VC else 1,
            needed_chars=needed,
        )


def build_prompt(history: MultiSeries, config: PipelineConfig) -> PromptPlan:
    """Encode and multiplex the history into the prompt string."""
    if config.sax is not None:
        stats = tuple(norm_stats(history.column(j)) for j in range(history.d))
        codec: DigitCodec | SaxCodec = SaxCodec(config.sax, stats)
        # SAX symbols are single-character values; DI and VI coincide at b=1.
        layout = MuxLayout(config.mux_scheme, history.d, 1, vocabulary(config.sax))
    else:
        params = tuple(fit_scale(history.column(j), config.digit_budget, config.headroom) for j in range(history.d))
        codec = DigitCodec(params)
        layout = MuxLayout(config.mux_scheme, history.d, config.digit_budget)

    encoded = codec.encode(history)
    prompt = mux(encoded, layout) + layout.vocabulary.separator
    return PromptPlan(prompt=prompt, layout=layout, codec=codec, encoded_history=encoded)


def encode_continuation(plan: PromptPlan, future: MultiSeries) -> str:
    """Render the true future in the plan's encoding (what a perfect model would emit)."""
    return mux(plan.codec.encode(future), plan.layout)


def median(values: Sequence[float]) -> float:
    """Median; the mean of the two central values for even counts."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptyInput("median of an empty collection")
    return float(np.median(values))


def aggregate(samples: Sequence[np.ndarray], horizon: int, fallback: np.ndarray) -> np.ndarray:
    """Per-cell median over the samples covering that cell.

    Cells no sample reaches are forward-filled from the previous row, or
    from ``fallback`` (the last history row) for the first row.
    """
    d = fallback.shape[0]
    out = np.empty((horizon, d))
    for r in range(horizon):
        covering = [s[r] for s in samples if s.shape[0] > r]
        for k in range(d):
            if covering:
                out[r, k] = median([row[k] for row in covering])
            else:
                out[r, k] = out[r - 1, k] if r > 0 else fallback[k]
    return out


@dataclass
class ForecastResult:
    """Median forecast plus what went into it."""

    forecast: np.ndarray
    dim_names: tuple[str, ...]
    per_sample: list[np.ndarray]
    valid_sample_count: int
    elapsed: float
    config_fingerprint: str
    prompt_chars: int
    continuations: list[str] = field(default_factory=list)
    parts: tuple[ForecastResult, ...] = ()

    def as_series(self) -> MultiSeries:
        return MultiSeries(self.forecast, self.dim_names)


class ForecastPipeline:
    """Orchestrates one MultiCast forecast against a generation backend."""

    def __init__(
        self,
        backend: GenerationBackend | None = None,
        on_progress: ProgressCallback | None = None,
    ):
        """Initialize pipeline.

        Args:
            backend: Generation backend (built from the request's selector if None)
            on_progress: Optional callback for progress updates (stage, data) -> None
        """
        self.backend = backend
        self.on_progress = on_progress

    def _report_progress(self, stage: str, data: dict | None = None) -> None:
        """Report progress to callback if registered.

        Args:
            stage: Pipeline stage name
            data: Optional metadata (prompt size, sample counts, ...)
        """
        if self.on_progress:
            try:
                self.on_progress(stage, data or {})
            except Exception as e:
                logger.warning(f"Progress callback failed: {e}")

    def _backend_for(self, request: ForecastRequest, plan: PromptPlan, future: MultiSeries | None) -> GenerationBackend:
        if self.backend is not None:
            return self.backend
        config = request.config
        if config.backend.kind is BackendKind.ORACLE:
            if future is None:
                raise InvalidConfig("oracle backend needs the true future to hide")
            return OracleBackend(encode_continuation(plan, future), max_workers=config.max_concurrency)
        return create_backend(config.backend, max_workers=config.max_concurrency)

    def forecast(self, request: ForecastRequest, future: MultiSeries | None = None) -> ForecastResult:
        """Run the full pipeline for one request.

        Args:
            request: History, horizon and configuration
            future: True continuation; only consulted to build an oracle backend

        Returns:
            ForecastResult with an m x d median forecast
        """
        start = time.perf_counter()
        config = request.config
        history = request.history
        horizon = request.horizon

        self._report_progress("encoding", {"n": history.n, "d": history.d, "scheme": str(config.mux_scheme)})
        plan = build_prompt(history, config)
        constraint = plan.constraint(horizon)
        backend = self._backend_for(request, plan, future)
        logger.info(
            f"Prompt: {len(plan.prompt)} chars for {history.n}x{history.d} "
            f"({config.mux_scheme.name}{', SAX' if config.sax else ''}); "
            f"requesting {config.num_samples} samples of <= {constraint.max_chars} chars"
        )

        self._report_progress("sampling", {"num_samples": config.num_samples, "max_chars": constraint.max_chars})
        continuations = backend.sample_continuations(plan.prompt, config.num_samples, constraint, config.sampling)

        self._report_progress("decoding", {"num_samples": len(continuations)})
        samples = []
        for i, text in enumerate(continuations):
            try:
                ints, complete = demux(text, plan.layout)
            except NoCompleteTimestamp:
                logger.warning(f"Discarding sample {i}: no complete timestamp in {text[:40]!r}")
                continue
            logger.debug(f"Sample {i}: {complete} complete timestamps")
            samples.append(plan.codec.decode(ints, horizon))

        if not samples:
            raise AllSamplesInvalid(len(continuations))

        forecast = aggregate(samples, horizon, history.values[-1])
        elapsed = time.perf_counter() - start
        self._report_progress("complete", {"valid_samples": len(samples), "elapsed": elapsed})
        logger.info(f"Kept {len(samples)}/{len(continuations)} samples in {elapsed:.3f}s")

        return ForecastResult(
            forecast=forecast,
            dim_names=history.dim_names,
            per_sample=samples,
            valid_sample_count=len(samples),
            elapsed=elapsed,
            config_fingerprint=config.fingerprint(),
            prompt_chars=len(plan.prompt),
            continuations=list(continuations),
        )

    def forecast_per_dimension(self, request: ForecastRequest, future: MultiSeries | None = None) -> ForecastResult:
        """Forecast every dimension on its own as a d=1 series.

        This is the univariate LLMTIME protocol the multiplexed schemes are
        compared against; with d=1 all three schemes render identically.
        """
        start = time.perf_counter()
        parts = []
        for name in request.history.dim_names:
            sub = ForecastRequest(request.history.select([name]), request.horizon, request.config)
            parts.append(self.forecast(sub, future.select([name]) if future is not None else None))

        return ForecastResult(
            forecast=np.column_stack([p.forecast for p in parts]),
            dim_names=request.history.dim_names,
            per_sample=[],
            valid_sample_count=min(p.valid_sample_count for p in parts),
            elapsed=time.perf_counter() - start,
            config_fingerprint=request.config.fingerprint(),
            prompt_chars=sum(p.prompt_chars for p in parts),
            continuations=[c for p in parts for c in p.continuations],
            parts=tuple(parts),
        )


def forecast(
    request: ForecastRequest,
    backend: GenerationBackend | None = None,
    future: MultiSeries | None = None,
) -> ForecastResult:
    """Convenience wrapper around ForecastPipeline.forecast."""
    return ForecastPipeline(backend=backend).forecast(request, future)
