"""
Result Storage

Saves benchmark results in machine and human formats to one directory per
dataset.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .errors import DatasetIOError
from .formatter import format_report, format_sweep
from .plot import emit_plot
from .report import ForecastReport, SweepReport
from .series import MultiSeries

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "multicast-results"


class ResultStorage:
    """Save reports, sweeps and plots."""

    def __init__(self, output_dir: Path | None = None):
        """Initialize storage.

        Args:
            output_dir: Base output directory (default: ./multicast-results)
        """
        self.output_dir = Path(output_dir or DEFAULT_OUTPUT_DIR).expanduser()
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise DatasetIOError(f"cannot create output directory {self.output_dir}: {e}") from e

    def dataset_dir(self, dataset: str) -> Path:
        path = self.output_dir / self._sanitize_filename(dataset)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def save_report(
        self,
        report: ForecastReport,
        save_json: bool = True,
        save_text: bool = True,
        omit_timing: bool = False,
    ) -> Path:
        """Save a benchmark report.

        Args:
            report: Report to save
            save_json: Write report.json
            save_text: Write report.txt (the aligned table)
            omit_timing: Null out wall-clock seconds so reruns compare byte-identical

        Returns:
            Path to the dataset directory containing the files
        """
        target = self.dataset_dir(report.dataset)
        logger.info(f"Saving to: {target}")

        saved_files = []
        if save_json:
            json_path = report.save(target / "report.json", omit_timing=omit_timing)
            saved_files.append(f"JSON: {json_path.name}")
        if save_text:
            text_path = self._write_text(target / "report.txt", format_report(report, show_timing=not omit_timing))
            saved_files.append(f"TXT: {text_path.name}")

        logger.info(f"Saved {len(saved_files)} files: {', '.join(saved_files)}")
        return target

    def save_sweep(self, sweep: SweepReport, omit_timing: bool = False) -> Path:
        target = self.dataset_dir(sweep.dataset)
        stem = f"sweep-{sweep.parameter}"
        self._write_text(target / f"{stem}.json", sweep.to_json(omit_timing))
        self._write_text(target / f"{stem}.txt", format_sweep(sweep, show_timing=not omit_timing))
        logger.info(f"Saved sweep over {sweep.parameter} to: {target}")
        return target

    def save_plots(
        self,
        report: ForecastReport,
        history: MultiSeries,
        future: MultiSeries,
        plots_dir: Path,
        method: str | None = None,
    ) -> list[Path]:
        """One SVG per dimension comparing a method's predictions to the actual future.

        Args:
            report: Report holding the predictions
            history: Training window
            future: Held-out actual values
            plots_dir: Directory for the SVGs (created if absent)
            method: Method to plot (default: first successful method)

        Returns:
            Paths of the written SVGs
        """
        chosen = next((m for m in report.methods if m.ok and (method is None or m.name == method)), None)
        if chosen is None or chosen.predictions is None:
            logger.warning("No successful method with predictions to plot")
            return []

        predictions = np.asarray(chosen.predictions, dtype=float)
        paths = []
        for j, dim in enumerate(future.dim_names):
            path = Path(plots_dir) / f"{self._sanitize_filename(report.dataset)}-{self._sanitize_filename(dim)}.svg"
            emit_plot(
                future.column(j),
                predictions[:, j],
                history.column(j),
                path,
                title=f"{chosen.name} versus actual for {dim}",
            )
            paths.append(path)
        logger.info(f"Saved {len(paths)} plots to: {plots_dir}")
        return paths

    def _write_text(self, path: Path, content: str) -> Path:
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(content)
        except OSError as e:
            raise DatasetIOError(f"cannot write {path}: {e}") from e
        return path

    def _sanitize_filename(self, name: str) -> str:
        """Sanitize filename for filesystem."""
        invalid_chars = '<>:"/\\|?* '
        for char in invalid_chars:
            name = name.replace(char, "_")
        return name[:100]
