"""
Rich CLI Interface for MultiCast

Command-line entry point: forecast, evaluate, inspect and sweep.
"""

from __future__ import annotations

import logging
import sys
from pathlib import Path

import click
import numpy as np
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.markup import escape
from rich.panel import Panel
from rich.table import Table

from .config import (
    DEFAULT_SEED,
    AlphabetKind,
    BackendKind,
    CliConfig,
    MuxScheme,
    parse_logit_bias,
    pipeline_config_from_options,
)
from .dataset import default_test_len, load_csv, save_csv, split
from .errors import EXIT_DATA, EXIT_IO, EXIT_USAGE, InvalidConfig, LengthMismatch, MultiCastError
from .evaluate import METHODS, SWEEP_PARAMETERS, resolve_methods, run_benchmark, run_sweep
from .formatter import build_report_table, format_sweep
from .multiplex import MuxLayout, mux
from .pipeline import ForecastPipeline, ForecastResult, build_prompt
from .sax import norm_stats, render_symbols, sax_encode
from .scaling import ScaleParams, apply_scale, fit_scale
from .series import ForecastRequest, MultiSeries
from .storage import DEFAULT_OUTPUT_DIR, ResultStorage

console = Console()
logger = logging.getLogger(__name__)

DEFAULT_METHODS = ",".join(METHODS)
COMMANDS = ["forecast", "evaluate", "inspect", "sweep"]


def setup_logging(verbose: bool = False):
    """Configure logging with Rich handler."""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, rich_tracebacks=True, show_time=False)],
    )


def _error(message: str) -> None:
    console.print(f"[red]Error:[/red] {escape(message)}", soft_wrap=True)


class MultiCastGroup(click.Group):
    """Click group mapping errors to single-line messages and exit codes."""

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except (KeyboardInterrupt, click.exceptions.Abort):
            console.print("\n[yellow]⚠ Interrupted[/yellow]")
            sys.exit(130)
        except click.ClickException as e:
            _error(e.format_message())
            sys.exit(EXIT_USAGE)
        except MultiCastError as e:
            _error(str(e))
            logger.debug("Traceback", exc_info=True)
            sys.exit(e.exit_code)
        except OSError as e:
            _error(str(e))
            sys.exit(EXIT_IO)
        sys.exit(rv or 0)


class LogitBiasType(click.ParamType):
    """A JSON object on the command line, or a table from the --config file."""

    name = "json"

    def convert(self, value, param, ctx):
        try:
            return parse_logit_bias(value)
        except InvalidConfig as e:
            self.fail(str(e), param, ctx)


LOGIT_BIAS = LogitBiasType()


def pipeline_options(command):
    """Options shared by every command that builds a PipelineConfig."""
    options = [
        click.option("--mux", type=click.Choice([s.value for s in MuxScheme]), default="vi", show_default=True,
                     help="Multiplexing scheme: digit interleaving, value interleaving, value concatenation"),
        click.option("--digits", type=click.IntRange(1, 10), default=3, show_default=True,
                     help="Digits per scaled value (b)"),
        click.option("--samples", type=click.IntRange(min=1), default=5, show_default=True,
                     help="Continuations sampled per forecast (median-aggregated)"),
        click.option("--sax/--no-sax", default=False, show_default=True, help="Quantize with SAX before multiplexing"),
        click.option("--segment-len", type=click.IntRange(min=1), default=6, show_default=True,
                     help="SAX segment length (w)"),
        click.option("--alphabet-size", type=int, default=5, show_default=True, help="SAX alphabet size (a)"),
        click.option("--alphabet", type=click.Choice([k.value for k in AlphabetKind]), default="alpha",
                     show_default=True, help="SAX symbols: letters or digits (digits allow a <= 10)"),
        click.option("--backend", type=click.Choice([k.value for k in BackendKind]), default="mock",
                     show_default=True, help="Generation backend"),
        click.option("--endpoint", type=str, default=None, help="Base URL of an OpenAI-compatible completions API"),
        click.option("--model", type=str, default=None, help="Model id sent to the endpoint"),
        click.option("--timeout", type=float, default=60.0, show_default=True, help="HTTP timeout in seconds"),
        click.option("--auth-token-env", type=str, default="OPENAI_API_KEY", show_default=True,
                     help="Environment variable holding the HTTP auth token"),
        click.option("--temperature", type=float, default=0.7, show_default=True, help="Sampling temperature"),
        click.option("--top-p", type=float, default=0.9, show_default=True, help="Nucleus mass"),
        click.option("--max-retry", type=click.IntRange(min=0), default=3, show_default=True,
                     help="Resamples of a continuation that leaves the vocabulary"),
        click.option("--logit-bias", type=LOGIT_BIAS, default=None,
                     help="JSON object of token id -> bias in [-100, 100] sent to the http backend"),
        click.option("--strict-vocabulary", is_flag=True, default=False,
                     help="Fail instead of truncating when http continuations leave the vocabulary"),
        click.option("--seed", type=str, default=str(DEFAULT_SEED), show_default=True,
                     help="Base seed (sample i uses seed + i), or 'random'"),
        click.option("--headroom", type=float, default=1.25, show_default=True,
                     help="Range multiplier left free above the history maximum"),
        click.option("--concurrency", type=click.IntRange(min=1), default=4, show_default=True,
                     help="Sample requests in flight per forecast"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _split_list(value: str, option: str) -> list[str]:
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise click.BadParameter("expected a comma-separated list", param_hint=option)
    return items


def _split_ints(value: str, option: str) -> list[int]:
    try:
        return [int(item) for item in _split_list(value, option)]
    except ValueError as e:
        raise click.BadParameter(f"expected integers, got {value!r}", param_hint=option) from e


input_option = click.option(
    "--input", "input_path", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Dataset CSV"
)


@click.group(cls=MultiCastGroup)
@click.option("--config", "config_path", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="TOML file of option defaults")
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.pass_context
def cli(ctx: click.Context, config_path: Path | None, verbose: bool):
    """Zero-shot multivariate forecasting with dimensional multiplexing.

    Option values are resolved as: command-line flags > --config TOML file >
    MULTICAST_* environment variables (e.g. MULTICAST_SAMPLES=10) > defaults.

    Examples:

        multicast forecast --input gas.csv --horizon 24 --output pred.csv

        multicast evaluate --input gas.csv --methods multicast-di,ar --plots plots/

        multicast inspect --input fig1.csv --mux vi --digits 2 --offset 0 --factor 10
    """
    # Load environment variables from .env
    load_dotenv()

    # Setup logging
    setup_logging(verbose)

    ctx.default_map = {**CliConfig.load(config_path).default_map(COMMANDS), **(ctx.default_map or {})}


@cli.command()
@input_option
@click.option("--horizon", type=click.IntRange(min=1), required=True, help="Timestamps to forecast (m)")
@click.option("--output", type=click.Path(dir_okay=False, path_type=Path), required=True, help="Forecast CSV")
@click.option("--future", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="True continuation CSV hidden by the oracle backend")
@pipeline_options
def forecast(input_path: Path, horizon: int, output: Path, future: Path | None, **options):
    """Forecast HORIZON timestamps after the end of the input series."""
    config = pipeline_config_from_options(options)
    dataset = load_csv(input_path)

    hidden = None
    if config.backend.kind is BackendKind.ORACLE:
        if future is None:
            raise click.UsageError("--backend oracle requires --future <csv>")
        hidden = load_csv(future).series.select(list(dataset.series.dim_names))
        if hidden.n < horizon:
            raise LengthMismatch(hidden.n, horizon)
        hidden = hidden.head(horizon)

    request = ForecastRequest(dataset.series, horizon, config)
    with console.status("[cyan]Encoding...") as status:
        pipeline = ForecastPipeline(on_progress=lambda stage, data: status.update(f"[cyan]{stage.capitalize()}..."))
        result = pipeline.forecast(request, future=hidden)

    save_csv(result.as_series(), output)
    _show_forecast(result, dataset.series)
    console.print(f"[green]✓ Forecast written to {escape(str(output))}[/green]")


@cli.command()
@input_option
@click.option("--test-len", type=click.IntRange(min=1), default=None, help="Held-out rows [default: ceil(0.2 n)]")
@click.option("--methods", type=str, default=DEFAULT_METHODS, show_default=True,
              help="Comma-separated methods; external:<csv> adds a precomputed forecast")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), default=DEFAULT_OUTPUT_DIR,
              show_default=True, help="Directory for report.json and report.txt")
@click.option("--plots", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Directory for per-dimension SVG plots")
@click.option("--plot-method", type=str, default=None, help="Method to plot [default: first successful]")
@click.option("--omit-timing", is_flag=True, help="Leave wall-clock seconds out of the report")
@pipeline_options
def evaluate(
    input_path: Path,
    test_len: int | None,
    methods: str,
    output_dir: Path,
    plots: Path | None,
    plot_method: str | None,
    omit_timing: bool,
    **options,
):
    """Score methods by RMSE on the held-out tail of the input series."""
    chosen = resolve_methods(_split_list(methods, "--methods"))
    config = pipeline_config_from_options(options)
    dataset = load_csv(input_path)
    test_len = default_test_len(dataset.series.n) if test_len is None else test_len

    console.print(
        Panel.fit(
            f"[bold cyan]MultiCast evaluation[/bold cyan]\n{escape(dataset.name)}: "
            f"{dataset.series.n} x {dataset.series.d}, test_len={test_len}, config {config.fingerprint()}",
            border_style="cyan",
        )
    )

    report = run_benchmark(dataset, chosen, config, test_len)
    storage = ResultStorage(output_dir)
    target = storage.save_report(report, omit_timing=omit_timing)

    console.print(build_report_table(report, show_timing=not omit_timing))
    for result in report.methods:
        if not result.ok:
            console.print(f"[red]✗ {escape(result.name)}: {escape(result.error or '')}[/red]")

    if plots is not None:
        history, future = split(dataset.series, test_len)
        storage.save_plots(report, history, future, plots, method=plot_method)

    console.print(f"\n[green]✓ Report saved to {escape(str(target))}[/green]")
    if not any(result.ok for result in report.methods):
        _error("every method failed")
        sys.exit(EXIT_DATA)


@cli.command()
@input_option
@click.option("--limit", type=click.IntRange(min=1), default=None, help="Only use the first LIMIT rows")
@click.option("--offset", type=float, default=None, help="Override the fitted scaling offset")
@click.option("--factor", type=float, default=None, help="Override the fitted scaling factor")
@pipeline_options
def inspect(input_path: Path, limit: int | None, offset: float | None, factor: float | None, **options):
    """Print the scaled integers, the multiplexed string and SAX words (no network use)."""
    config = pipeline_config_from_options(options)
    series = load_csv(input_path).series
    if limit is not None:
        series = series.head(limit)

    if config.sax is not None:
        plan = build_prompt(series, config)
        stats = [norm_stats(series.column(j)) for j in range(series.d)]
        for name, word in zip(series.dim_names, sax_encode(series, config.sax, stats), strict=True):
            symbols = render_symbols(word, config.sax.alphabet_kind)
            console.print(f"[cyan]{escape(name)}[/cyan] {symbols}", soft_wrap=True)
        encoded = plan.encoded_history
        text = plan.prompt[:-1]
    else:
        params = []
        for j in range(series.d):
            fitted = fit_scale(series.column(j), config.digit_budget, config.headroom)
            params.append(
                ScaleParams(
                    offset=fitted.offset if offset is None else offset,
                    factor=fitted.factor if factor is None else factor,
                    digit_budget=config.digit_budget,
                )
            )
        encoded = np.column_stack([apply_scale(series.column(j), p) for j, p in enumerate(params)])
        text = mux(encoded, MuxLayout(config.mux_scheme, series.d, config.digit_budget))
        for name, p in zip(series.dim_names, params, strict=True):
            console.print(f"[dim]{escape(name)}: offset={p.offset:.6g} factor={p.factor:.6g}[/dim]")

    table = Table(title="Scaled values", show_header=True, header_style="bold cyan")
    table.add_column("t", justify="right")
    for name in series.dim_names:
        table.add_column(name, justify="right")
    for t, row in enumerate(encoded.tolist()):
        table.add_row(str(t), *(str(v) for v in row))
    console.print(table)

    console.print(text, markup=False, highlight=False, soft_wrap=True)
    console.print(f"[dim]{len(text)} characters[/dim]")


@cli.command()
@input_option
@click.option("--parameter", type=click.Choice([p.replace("_", "-") for p in SWEEP_PARAMETERS]), required=True,
              help="Parameter to vary")
@click.option("--values", type=str, required=True, help="Comma-separated values, e.g. 5,10,20")
@click.option("--methods", type=str, default="multicast-vi", show_default=True, help="Comma-separated methods")
@click.option("--test-len", type=click.IntRange(min=1), default=None, help="Held-out rows [default: ceil(0.2 n)]")
@click.option("--output-dir", type=click.Path(file_okay=False, path_type=Path), default=DEFAULT_OUTPUT_DIR,
              show_default=True, help="Directory for the sweep JSON and table")
@click.option("--omit-timing", is_flag=True, help="Leave wall-clock seconds out of the sweep JSON")
@pipeline_options
def sweep(
    input_path: Path,
    parameter: str,
    values: str,
    methods: str,
    test_len: int | None,
    output_dir: Path,
    omit_timing: bool,
    **options,
):
    """Repeat the evaluation while varying one parameter."""
    chosen = resolve_methods(_split_list(methods, "--methods"))
    points = _split_ints(values, "--values")
    config = pipeline_config_from_options(options)
    dataset = load_csv(input_path)

    result = run_sweep(dataset, chosen, config, parameter, points, test_len)
    target = ResultStorage(output_dir).save_sweep(result, omit_timing=omit_timing)

    console.print(format_sweep(result, show_timing=not omit_timing), markup=False, highlight=False)
    console.print(f"[green]✓ Sweep saved to {escape(str(target))}[/green]")


def _show_forecast(result: ForecastResult, history: MultiSeries):
    """Display per-dimension forecast summary table."""
    table = Table(title="Forecast", show_header=True, header_style="bold cyan")
    table.add_column("Dimension")
    table.add_column("Last observed", justify="right")
    table.add_column("First", justify="right")
    table.add_column("Last", justify="right")
    table.add_column("Mean", justify="right")

    for j, name in enumerate(result.dim_names):
        column = result.forecast[:, j]
        table.add_row(
            escape(name),
            f"{history.column(j)[-1]:.4g}",
            f"{column[0]:.4g}",
            f"{column[-1]:.4g}",
            f"{column.mean():.4g}",
        )

    console.print(table)
    console.print(
        f"  Samples kept: {result.valid_sample_count}  Prompt: {result.prompt_chars} chars  "
        f"Elapsed: {result.elapsed:.2f}s  Config: {result.config_fingerprint}"
    )


def main():
    """Entry point for the CLI."""
    cli()


if __name__ == "__main__":
    main()
