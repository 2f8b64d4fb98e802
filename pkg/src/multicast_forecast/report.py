"""
Benchmark Reports

Per-method results of a benchmark or sweep, with JSON persistence.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from .errors import DatasetIOError, InvalidConfig

logger = logging.getLogger(__name__)


@dataclass
class MethodResult:
    """Result of running one method on one split."""

    name: str
    per_dim_rmse: dict[str, float | None]
    seconds: float | None = None
    error: str | None = None
    prompt_chars: int | None = None
    predictions: list[list[float]] | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self, omit_timing: bool = False) -> dict[str, Any]:
        data = asdict(self)
        if omit_timing:
            data["seconds"] = None
        if data["error"] is None:
            del data["error"]
        return data


@dataclass
class ForecastReport:
    """RMSE per (method, dimension) for one dataset split."""

    dataset: str
    dim_names: list[str]
    test_len: int
    config: dict[str, Any] = field(default_factory=dict)
    config_fingerprint: str = ""
    methods: list[MethodResult] = field(default_factory=list)

    def add(self, result: MethodResult) -> None:
        if result.ok:
            logger.info(f"✓ {result.name}: {_rmse_summary(result)}")
        else:
            logger.warning(f"✗ {result.name} failed: {result.error}")
        self.methods.append(result)

    def method(self, name: str) -> MethodResult:
        for result in self.methods:
            if result.name == name:
                return result
        raise KeyError(name)

    def ranking(self, dim: str) -> list[str]:
        """Method names with a finite RMSE on ``dim``, best first (ties keep run order)."""
        scored = [
            (value, i, m.name)
            for i, m in enumerate(self.methods)
            if (value := m.per_dim_rmse.get(dim)) is not None and math.isfinite(value)
        ]
        return [name for _, _, name in sorted(scored)]

    def cell_count(self) -> int:
        return sum(len(m.per_dim_rmse) for m in self.methods)

    def to_dict(self, omit_timing: bool = False) -> dict[str, Any]:
        return {
            "dataset": self.dataset,
            "dim_names": list(self.dim_names),
            "test_len": self.test_len,
            "config": self.config,
            "config_fingerprint": self.config_fingerprint,
            "methods": [m.to_dict(omit_timing) for m in self.methods],
        }

    def to_json(self, omit_timing: bool = False) -> str:
        return json.dumps(self.to_dict(omit_timing), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ForecastReport:
        try:
            methods = [MethodResult(**m) for m in data.get("methods", [])]
            return cls(
                dataset=data["dataset"],
                dim_names=list(data["dim_names"]),
                test_len=int(data["test_len"]),
                config=data.get("config", {}),
                config_fingerprint=data.get("config_fingerprint", ""),
                methods=methods,
            )
        except (KeyError, TypeError) as e:
            raise InvalidConfig(f"not a forecast report: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> ForecastReport:
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as e:
            raise InvalidConfig(f"report is not valid JSON: {e}") from e

    def save(self, path: Path, omit_timing: bool = False) -> Path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(self.to_json(omit_timing))
        except OSError as e:
            raise DatasetIOError(f"cannot write report {path}: {e}") from e
        logger.debug(f"Report saved to: {path}")
        return path

    @classmethod
    def load(cls, path: Path) -> ForecastReport:
        try:
            with open(path, encoding="utf-8") as f:
                return cls.from_json(f.read())
        except OSError as e:
            raise DatasetIOError(f"cannot read report {path}: {e}") from e


@dataclass
class SweepPoint:
    value: int
    report: ForecastReport


@dataclass
class SweepReport:
    """One benchmark per value of a single varied parameter."""

    dataset: str
    parameter: str
    points: list[SweepPoint] = field(default_factory=list)

    @property
    def values(self) -> list[int]:
        return [p.value for p in self.points]

    def to_dict(self, omit_timing: bool = False) -> dict[str, Any]:
        return {
            "dataset": self.dataset,
            "parameter": self.parameter,
            "points": [{"value": p.value, "report": p.report.to_dict(omit_timing)} for p in self.points],
        }

    def to_json(self, omit_timing: bool = False) -> str:
        return json.dumps(self.to_dict(omit_timing), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> SweepReport:
        try:
            data = json.loads(text)
            points = [SweepPoint(int(p["value"]), ForecastReport.from_dict(p["report"])) for p in data["points"]]
            return cls(dataset=data["dataset"], parameter=data["parameter"], points=points)
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise InvalidConfig(f"not a sweep report: {e}") from e


def _rmse_summary(result: MethodResult) -> str:
    cells = ", ".join(f"{dim}={value:.4g}" for dim, value in result.per_dim_rmse.items() if value is not None)
    seconds = f" in {result.seconds:.2f}s" if result.seconds is not None else ""
    return f"RMSE {cells}{seconds}"
