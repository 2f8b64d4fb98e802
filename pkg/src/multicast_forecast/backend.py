"""
Generation Backends

Text continuation behind one interface. The HTTP backend talks to any
OpenAI-compatible completions endpoint; the mock and oracle backends run
in-process for offline use and testing.
"""

from __future__ import annotations

import logging
import os
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import BackendKind, BackendSelector, SamplingParams
from .errors import (
    BackendTimeout,
    BackendUnreachable,
    ConstraintUnsupported,
    HttpStatus,
    InvalidConfig,
    MalformedResponse,
)

try:
    import openai
    from openai import OpenAI

    OPENAI_AVAILABLE = True
except ImportError:
    OPENAI_AVAILABLE = False

logger = logging.getLogger(__name__)

MAX_SUFFIX = 64


@dataclass(frozen=True)
class GenerationConstraint:
    """Output alphabet and length limits for one continuation.

    ``needed_chars`` is the length of ``stop_after_timestamps`` complete
    steps under the active layout; ``max_chars`` may not be smaller.
    """

    allowed_chars: frozenset[str]
    max_chars: int
    stop_after_timestamps: int
    separator: str = ","
    separators_per_timestamp: int = 1
    needed_chars: int = 0

    def __post_init__(self):
        object.__setattr__(self, "allowed_chars", frozenset(self.allowed_chars))
        if not self.allowed_chars:
            raise InvalidConfig("allowed character set is empty")
        if self.max_chars < 0:
            raise InvalidConfig(f"max_chars must be >= 0, got {self.max_chars}")
        if self.stop_after_timestamps < 0 or self.separators_per_timestamp < 1:
            raise InvalidConfig(
                f"bad stop rule: {self.stop_after_timestamps} timestamps of {self.separators_per_timestamp} separators"
            )
        if self.max_chars < self.needed_chars:
            raise InvalidConfig(
                f"max_chars {self.max_chars} cannot hold {self.stop_after_timestamps} timestamps "
                f"({self.needed_chars} chars)"
            )

    def first_violation(self, text: str) -> int | None:
        for i, char in enumerate(text):
            if char not in self.allowed_chars:
                return i
        return None

    def stop_index(self, text: str) -> int | None:
        """End of the last requested timestamp, its separator included."""
        wanted = self.stop_after_timestamps * self.separators_per_timestamp
        if wanted == 0:
            return None
        seen = 0
        for i, char in enumerate(text):
            if char == self.separator:
                seen += 1
                if seen == wanted:
                    return i + 1
        return None

    def enforce(self, text: str) -> str:
        """Truncate at the first disallowed character, after the last requested timestamp, then at max_chars."""
        cut = self.first_violation(text)
        if cut is not None:
            text = text[:cut]
        stop = self.stop_index(text)
        if stop is not None:
            text = text[:stop]
        return text[: self.max_chars]


class GenerationBackend(ABC):
    """Samples n continuations of a prompt under a vocabulary constraint."""

    def __init__(self, max_workers: int = 1):
        self.max_workers = max(1, max_workers)

    def sample_continuations(
        self,
        prompt: str,
        n: int,
        constraint: GenerationConstraint,
        params: SamplingParams,
    ) -> list[str]:
        """Return exactly n constrained continuations, in request order."""
        if n < 1:
            raise InvalidConfig(f"number of samples must be >= 1, got {n}")
        if constraint.first_violation(prompt) is not None:
            raise InvalidConfig("prompt contains characters outside the allowed vocabulary")

        def one(index: int) -> str:
            return constraint.enforce(self.complete(prompt, constraint, params, index))

        if self.max_workers > 1 and n > 1:
            with ThreadPoolExecutor(max_workers=min(self.max_workers, n)) as pool:
                return list(pool.map(one, range(n)))
        return [one(i) for i in range(n)]

    @abstractmethod
    def complete(self, prompt: str, constraint: GenerationConstraint, params: SamplingParams, sample_index: int) -> str:
        """Produce one raw continuation (enforcement happens in the caller)."""


# Mock


def _occurrences(haystack: str, needle: str) -> list[int]:
    found = []
    start = haystack.find(needle)
    while start != -1:
        found.append(start)
        start = haystack.find(needle, start + 1)
    return found


def _cycle(unit: str, length: int) -> str:
    if not unit or length <= 0:
        return ""
    repeats = length // len(unit) + 1
    return (unit * repeats)[:length]


def mock_predict(
    prompt: str,
    constraint: GenerationConstraint,
    params: SamplingParams,
    seed: int | None = None,
    separator: str = ",",
) -> str:
    """Deterministic longest-suffix continuation.

    Finds the longest prompt suffix (up to 64 characters) that also occurs
    earlier, then cycles the characters that followed that earlier
    occurrence. Without any recurrence the final chunk is repeated.
    When several earlier occurrences exist, the seed picks one.
    """
    if not prompt:
        raise InvalidConfig("mock backend needs a non-empty prompt")

    n = len(prompt)
    # Occurrences must end before the final character, i.e. lie in prompt[:-1].
    earlier = prompt[:-1]
    for length in range(min(MAX_SUFFIX, n - 1), 0, -1):
        starts = _occurrences(earlier, prompt[-length:])
        if starts:
            rng = np.random.default_rng(0 if seed is None else seed)
            start = starts[-1] if len(starts) == 1 else starts[int(rng.integers(len(starts)))]
            follow = prompt[start + length :]
            return constraint.enforce(_cycle(follow, constraint.max_chars))

    chunks = prompt.rstrip(separator).split(separator)
    last = chunks[-1] if chunks else ""
    unit = last + separator if last else ""
    return constraint.enforce(_cycle(unit, constraint.max_chars))


class MockBackend(GenerationBackend):
    """In-process stand-in copying the prompt's own repetitions."""

    def __init__(self, separator: str = ",", max_workers: int = 1):
        super().__init__(max_workers)
        self.separator = separator

    def complete(self, prompt, constraint, params, sample_index):
        return mock_predict(prompt, constraint, params, seed=params.seed_for(sample_index), separator=self.separator)


class OracleBackend(GenerationBackend):
    """Returns the hidden true continuation for every sample."""

    def __init__(self, hidden_continuation: str, max_workers: int = 1):
        super().__init__(max_workers)
        self.hidden_continuation = hidden_continuation

    def complete(self, prompt, constraint, params, sample_index):
        return self.hidden_continuation


# HTTP


def _create_client(endpoint: str, timeout: float, auth_token_env: str | None) -> OpenAI:
    if not OPENAI_AVAILABLE:
        raise ImportError("openai package not available. Install with: pip install openai")

    api_key = os.getenv(auth_token_env) if auth_token_env else None
    if not api_key:
        logger.debug(f"No token in ${auth_token_env}; sending unauthenticated requests")
        api_key = "EMPTY"

    return OpenAI(base_url=endpoint, api_key=api_key, timeout=timeout, max_retries=0)


def _request_text(
    client: OpenAI,
    model_id: str | None,
    prompt: str,
    constraint: GenerationConstraint,
    params: SamplingParams,
    seed: int | None,
    logit_bias: dict[str, float] | None,
) -> str:
    extra = {"logit_bias": {str(k): int(v) for k, v in logit_bias.items()}} if logit_bias else {}
    try:
        response = client.completions.create(
            model=model_id or "default",
            prompt=prompt,
            max_tokens=max(1, constraint.max_chars),
            temperature=params.temperature,
            top_p=params.nucleus_mass,
            stop=["\n"],
            seed=seed,
            **extra,
        )
    except openai.APITimeoutError as e:
        raise BackendTimeout(f"completion request timed out: {e}") from e
    except openai.APIConnectionError as e:
        raise BackendUnreachable(f"cannot reach completion endpoint: {e}") from e
    except openai.APIStatusError as e:
        raise HttpStatus(e.status_code, str(e.message)) from e

    choices = getattr(response, "choices", None)
    if not choices or getattr(choices[0], "text", None) is None:
        raise MalformedResponse("completion response has no generated text")
    return choices[0].text


def http_complete(
    endpoint: str,
    model_id: str | None,
    prompt: str,
    constraint: GenerationConstraint,
    params: SamplingParams,
    *,
    client: OpenAI | None = None,
    seed: int | None = None,
    logit_bias: dict[str, float] | None = None,
    timeout: float = 60.0,
    auth_token_env: str | None = "OPENAI_API_KEY",
    strict: bool = False,
) -> str:
    """One constrained completion from an OpenAI-compatible endpoint.

    Vocabulary is enforced by logit bias when one is configured; otherwise
    by rejection: resample up to max_retry times, then truncate at the first
    disallowed character (or raise ConstraintUnsupported when strict).
    """
    client = client or _create_client(endpoint, timeout, auth_token_env)

    text = ""
    for attempt in range(params.max_retry + 1):
        text = _request_text(client, model_id, prompt, constraint, params, seed, logit_bias)
        if constraint.first_violation(text) is None:
            return constraint.enforce(text)
        if attempt < params.max_retry:
            logger.warning(f"Continuation violated the vocabulary, resampling ({attempt + 1}/{params.max_retry})")

    if strict:
        raise ConstraintUnsupported(
            f"endpoint produced disallowed characters after {params.max_retry} retries and cannot be biased"
        )
    return constraint.enforce(text)


class HttpBackend(GenerationBackend):
    """Completions over HTTP via the openai SDK."""

    def __init__(
        self,
        endpoint: str,
        model_id: str | None = None,
        timeout: float = 60.0,
        auth_token_env: str | None = "OPENAI_API_KEY",
        logit_bias: dict[str, float] | None = None,
        strict: bool = False,
        max_workers: int = 1,
        client: OpenAI | None = None,
    ):
        super().__init__(max_workers)
        self.endpoint = endpoint
        self.model_id = model_id
        self.timeout = timeout
        self.auth_token_env = auth_token_env
        self.logit_bias = logit_bias
        self.strict = strict
        self.client = client or _create_client(endpoint, timeout, auth_token_env)

    def complete(self, prompt, constraint, params, sample_index):
        return http_complete(
            self.endpoint,
            self.model_id,
            prompt,
            constraint,
            params,
            client=self.client,
            seed=params.seed_for(sample_index),
            logit_bias=self.logit_bias,
            strict=self.strict,
        )


def create_backend(
    selector: BackendSelector,
    hidden_continuation: str | None = None,
    max_workers: int = 1,
) -> GenerationBackend:
    """Instantiate the backend a selector names."""
    if selector.kind is BackendKind.MOCK:
        return MockBackend(max_workers=max_workers)
    if selector.kind is BackendKind.ORACLE:
        if hidden_continuation is None:
            raise InvalidConfig("oracle backend needs the hidden future continuation")
        return OracleBackend(hidden_continuation, max_workers=max_workers)

    assert selector.endpoint is not None
    logger.info(
        f"Using completion endpoint {selector.endpoint} (model: {selector.model_id or 'default'}, "
        f"{'logit bias' if selector.logit_bias else 'rejection sampling'}{', strict' if selector.strict else ''})"
    )
    return HttpBackend(
        endpoint=selector.endpoint,
        model_id=selector.model_id,
        timeout=selector.timeout,
        auth_token_env=selector.auth_token_env,
        logit_bias=selector.logit_bias,
        strict=selector.strict,
        max_workers=max_workers,
    )
