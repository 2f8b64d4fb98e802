"""
Configuration

Frozen configuration types shared by every stage, plus the CLI layering of
command-line flags > TOML file > MULTICAST_* environment variables > defaults.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import secrets
import tomllib
from dataclasses import asdict, dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any

from .errors import (
    AlphabetTooSmall,
    DatasetIOError,
    DigitalAlphabetOverflow,
    InvalidConfig,
    MissingEndpoint,
)

logger = logging.getLogger(__name__)

ENV_PREFIX = "MULTICAST_"
DEFAULT_SEED = 42
MAX_DIGIT_BUDGET = 10
MAX_DIGITAL_ALPHABET = 10
MAX_ALPHABETICAL_ALPHABET = 26


class MuxScheme(StrEnum):
    DI = "di"  # digit interleaving
    VI = "vi"  # value interleaving
    VC = "vc"  # value concatenation


class AlphabetKind(StrEnum):
    ALPHABETICAL = "alpha"
    DIGITAL = "digit"


class BackendKind(StrEnum):
    HTTP = "http"
    MOCK = "mock"
    ORACLE = "oracle"


@dataclass(frozen=True)
class SamplingParams:
    """Sampling knobs forwarded to the generation backend."""

    temperature: float = 0.7
    nucleus_mass: float = 0.9
    max_retry: int = 3
    seed: int | None = DEFAULT_SEED

    def __post_init__(self):
        if not self.temperature > 0:
            raise InvalidConfig(f"temperature must be > 0, got {self.temperature}")
        if not 0 < self.nucleus_mass <= 1:
            raise InvalidConfig(f"nucleus mass must lie in (0, 1], got {self.nucleus_mass}")
        if self.max_retry < 0:
            raise InvalidConfig(f"max_retry must be >= 0, got {self.max_retry}")

    def seed_for(self, sample_index: int) -> int | None:
        return None if self.seed is None else self.seed + sample_index


@dataclass(frozen=True)
class SaxConfig:
    """SAX quantization: w points per segment, a symbols per alphabet."""

    segment_length: int = 6
    alphabet_size: int = 5
    alphabet_kind: AlphabetKind = AlphabetKind.ALPHABETICAL

    def __post_init__(self):
        object.__setattr__(self, "alphabet_kind", AlphabetKind(self.alphabet_kind))
        if self.segment_length < 1:
            raise InvalidConfig(f"SAX segment length must be >= 1, got {self.segment_length}")
        if self.alphabet_size < 2:
            raise AlphabetTooSmall(self.alphabet_size)
        if self.alphabet_kind is AlphabetKind.DIGITAL and self.alphabet_size > MAX_DIGITAL_ALPHABET:
            raise DigitalAlphabetOverflow(self.alphabet_size)
        if self.alphabet_size > MAX_ALPHABETICAL_ALPHABET:
            raise InvalidConfig(f"alphabetical SAX alphabet supports at most 26 symbols, got {self.alphabet_size}")


def parse_logit_bias(value: str | dict[str, Any] | None) -> dict[str, float] | None:
    """Token id -> bias map from a JSON object string or a TOML table.

    Biases are limited to [-100, 100], the range completion APIs accept.
    """
    if value is None or value == "":
        return None
    if isinstance(value, str):
        try:
            value = json.loads(value)
        except json.JSONDecodeError as e:
            raise InvalidConfig(f"logit bias is not valid JSON: {e}") from e
    if not isinstance(value, dict):
        raise InvalidConfig("logit bias must map token ids to numbers")

    bias = {}
    for token, amount in value.items():
        if isinstance(amount, bool) or not isinstance(amount, int | float):
            raise InvalidConfig(f"logit bias for token {token!r} must be a number, got {amount!r}")
        if not -100 <= amount <= 100:
            raise InvalidConfig(f"logit bias for token {token!r} must lie in [-100, 100], got {amount}")
        bias[str(token)] = float(amount)
    return bias or None


@dataclass(frozen=True)
class BackendSelector:
    """Which generation backend to use and how to reach it."""

    kind: BackendKind = BackendKind.MOCK
    endpoint: str | None = None
    model_id: str | None = None
    timeout: float = 60.0
    auth_token_env: str | None = "OPENAI_API_KEY"
    logit_bias: dict[str, float] | None = None
    strict: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", BackendKind(self.kind))
        if self.logit_bias is not None:
            object.__setattr__(self, "logit_bias", parse_logit_bias(self.logit_bias))
        if self.kind is BackendKind.HTTP and not self.endpoint:
            raise MissingEndpoint()
        if self.timeout <= 0:
            raise InvalidConfig(f"timeout must be > 0, got {self.timeout}")


@dataclass(frozen=True)
class PipelineConfig:
    """Everything that determines one MultiCast forecast."""

    mux_scheme: MuxScheme = MuxScheme.VI
    digit_budget: int = 3
    num_samples: int = 5
    sax: SaxConfig | None = None
    sampling: SamplingParams = field(default_factory=SamplingParams)
    backend: BackendSelector = field(default_factory=BackendSelector)
    headroom: float = 1.25
    max_concurrency: int = 4

    def __post_init__(self):
        object.__setattr__(self, "mux_scheme", MuxScheme(self.mux_scheme))
        if not 1 <= self.digit_budget <= MAX_DIGIT_BUDGET:
            raise InvalidConfig(f"digit budget must lie in [1, 10], got {self.digit_budget}")
        if self.num_samples < 1:
            raise InvalidConfig(f"number of samples must be >= 1, got {self.num_samples}")
        if self.headroom < 1:
            raise InvalidConfig(f"headroom must be >= 1, got {self.headroom}")
        if self.max_concurrency < 1:
            raise InvalidConfig(f"max concurrency must be >= 1, got {self.max_concurrency}")

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        # Only the auth variable name is recorded, never the token.
        return json.loads(json.dumps(data, default=str))

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]


# CLI layering


def load_config_file(path: Path | None) -> dict[str, Any]:
    """Read a flat TOML table of option values (keys use option names)."""
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except OSError as e:
        raise DatasetIOError(f"cannot read config file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise InvalidConfig(f"invalid TOML in {path}: {e}") from e

    logger.debug(f"Loaded {len(data)} settings from {path}")
    return {_normalize_key(key): value for key, value in data.items()}


def load_env_config(environ: dict[str, str] | None = None) -> dict[str, str]:
    """Collect MULTICAST_* environment variables as option values."""
    environ = dict(os.environ) if environ is None else environ
    return {
        _normalize_key(key[len(ENV_PREFIX) :]): value
        for key, value in environ.items()
        if key.startswith(ENV_PREFIX) and len(key) > len(ENV_PREFIX)
    }


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


@dataclass
class CliConfig:
    """Merged view of file and environment settings below command-line flags."""

    file_values: dict[str, Any] = field(default_factory=dict)
    env_values: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def load(cls, path: Path | None = None, environ: dict[str, str] | None = None) -> CliConfig:
        return cls(file_values=load_config_file(path), env_values=load_env_config(environ))

    def merged(self) -> dict[str, Any]:
        # Click applies command-line flags on top of default_map.
        return {**self.env_values, **self.file_values}

    def default_map(self, commands: list[str]) -> dict[str, dict[str, Any]]:
        merged = self.merged()
        return {name: dict(merged) for name in commands}


def resolve_seed(seed: str | int | None) -> int | None:
    """Turn the --seed option into an integer ('random' draws entropy)."""
    if seed is None:
        return None
    if isinstance(seed, int):
        return seed
    if seed.strip().lower() == "random":
        return secrets.randbelow(2**31)
    try:
        return int(seed)
    except ValueError as e:
        raise InvalidConfig(f"seed must be an integer or 'random', got {seed!r}") from e


def pipeline_config_from_options(options: dict[str, Any]) -> PipelineConfig:
    """Build a PipelineConfig from CLI option values."""
    alphabet_kind = AlphabetKind(options.get("alphabet", AlphabetKind.ALPHABETICAL))
    alphabet_size = options.get("alphabet_size", 5)
    sax = None
    if options.get("sax"):
        sax = SaxConfig(
            segment_length=options.get("segment_len", 6),
            alphabet_size=alphabet_size,
            alphabet_kind=alphabet_kind,
        )
    elif alphabet_kind is AlphabetKind.DIGITAL and alphabet_size > MAX_DIGITAL_ALPHABET:
        # The digital limit holds whether or not SAX is on.
        raise DigitalAlphabetOverflow(alphabet_size)

    sampling = SamplingParams(
        temperature=options.get("temperature", 0.7),
        nucleus_mass=options.get("top_p", 0.9),
        max_retry=options.get("max_retry", 3),
        seed=resolve_seed(options.get("seed", DEFAULT_SEED)),
    )

    backend = BackendSelector(
        kind=BackendKind(options.get("backend", BackendKind.MOCK)),
        endpoint=options.get("endpoint"),
        model_id=options.get("model"),
        timeout=options.get("timeout", 60.0),
        auth_token_env=options.get("auth_token_env", "OPENAI_API_KEY"),
        logit_bias=options.get("logit_bias"),
        strict=bool(options.get("strict_vocabulary", False)),
    )

    return PipelineConfig(
        mux_scheme=MuxScheme(options.get("mux", MuxScheme.VI)),
        digit_budget=options.get("digits", 3),
        num_samples=options.get("samples", 5),
        sax=sax,
        sampling=sampling,
        backend=backend,
        headroom=options.get("headroom", 1.25),
        max_concurrency=options.get("concurrency", 4),
    )
