"""
Report Formatter

Renders reports as aligned text tables. Per dimension the lowest RMSE is
marked **x** and the runner-up _x_.
"""

from __future__ import annotations

import io
import logging

from rich import box
from rich.console import Console
from rich.table import Table

from .report import ForecastReport, SweepReport

logger = logging.getLogger(__name__)

TABLE_WIDTH = 200


def _format_rmse(value: float | None, rank: int | None) -> str:
    """Format one RMSE cell with its best/second-best annotation."""
    if value is None:
        return "failed"
    text = f"{value:.4f}"
    if rank == 0:
        return f"**{text}**"
    if rank == 1:
        return f"_{text}_"
    return text


def _format_seconds(seconds: float | None) -> str:
    return "-" if seconds is None else f"{seconds:.2f}"


def _render(table: Table) -> str:
    buffer = io.StringIO()
    console = Console(file=buffer, width=TABLE_WIDTH, color_system=None, force_terminal=False, legacy_windows=False)
    console.print(table)
    return buffer.getvalue()


def build_report_table(report: ForecastReport, show_timing: bool = True) -> Table:
    table = Table(title=f"Forecasting RMSE for {report.dataset}", box=box.MARKDOWN, show_header=True)
    table.add_column("Method")
    for dim in report.dim_names:
        table.add_column(dim, justify="right")
    if show_timing:
        table.add_column("Seconds", justify="right")

    ranks = {dim: {name: i for i, name in enumerate(report.ranking(dim)[:2])} for dim in report.dim_names}
    for result in report.methods:
        cells = [result.name]
        cells += [_format_rmse(result.per_dim_rmse.get(dim), ranks[dim].get(result.name)) for dim in report.dim_names]
        if show_timing:
            cells.append(_format_seconds(result.seconds))
        table.add_row(*cells)
    return table


def format_report(report: ForecastReport, show_timing: bool = True) -> str:
    """Aligned text table of a benchmark report, failures listed below it.

    Args:
        report: Benchmark report
        show_timing: Include the wall-clock column

    Returns:
        Plain text (no terminal styling)
    """
    lines = [_render(build_report_table(report, show_timing)).rstrip("\n")]
    failed = [m for m in report.methods if not m.ok]
    if failed:
        lines.append("")
        lines.extend(f"{m.name}: {m.error}" for m in failed)
    lines.append("")
    lines.append(f"test_len={report.test_len}  config={report.config_fingerprint}")
    return "\n".join(lines) + "\n"


def format_sweep(sweep: SweepReport, show_timing: bool = True) -> str:
    """One row per (value, method): RMSE per dimension plus seconds."""
    dims = sweep.points[0].report.dim_names if sweep.points else []
    table = Table(title=f"{sweep.dataset}: sweep over {sweep.parameter}", box=box.MARKDOWN)
    table.add_column(sweep.parameter, justify="right")
    table.add_column("Method")
    for dim in dims:
        table.add_column(dim, justify="right")
    if show_timing:
        table.add_column("Seconds", justify="right")

    for point in sweep.points:
        for result in point.report.methods:
            cells = [str(point.value), result.name]
            cells += [_format_rmse(result.per_dim_rmse.get(dim), None) for dim in dims]
            if show_timing:
                cells.append(_format_seconds(result.seconds))
            table.add_row(*cells)
    return _render(table)
