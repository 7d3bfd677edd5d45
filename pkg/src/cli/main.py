"""sphcov command line interface."""

import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional

import typer
from rich import print
from rich.markup import escape

from src import __version__
from src.api import (
    COMPARE_NAME,
    ChainReport,
    compare_archives,
    fit_dynamic,
    fit_static,
    generate_periodic_dataset,
    summarize_archive,
    validate_iw,
)
from src.cli.dispatch import EXIT_OK, EXIT_VALIDATION_FAILED, resolve_config, run_with_exit_codes
from src.cli.options import CommandOptions
from src.utils.logger import configure_logging, info, success, warn

logger = logging.getLogger(__name__)

app: typer.Typer = typer.Typer(help="sphcov: Bayesian static and dynamic covariance estimation on spheres")


def _print_version_and_exit(value: bool) -> None:
    if value:
        print(f"[bold cyan]sphcov v{__version__}[/]")
        raise typer.Exit()


@app.callback()
def _root_options(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug detail."),
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        callback=_print_version_and_exit,
        is_eager=True,
        help="Show the version and exit.",
    ),
) -> None:
    """sphcov: Bayesian static and dynamic covariance estimation on spheres."""
    configure_logging(verbose)


def _config_option() -> Any:
    return typer.Option(None, "--config", "-c", help="Experiment document (JSON, or TOML by suffix)")


def _seed_option() -> Any:
    return typer.Option(None, "--seed", help="Seed for every random stream (64-bit unsigned)")


def _out_option(default: str) -> Any:
    return typer.Option(Path(default), "--out", "-o", help="Output directory")


def _iters_option() -> Any:
    return typer.Option(None, "--iters", help="Total iterations per chain")


def _burnin_option() -> Any:
    return typer.Option(None, "--burnin", help="Burn-in iterations (default: a third of --iters)")


def _thin_option() -> Any:
    return typer.Option(None, "--thin", help="Keep every n-th post-burn-in draw")


def _chains_option() -> Any:
    return typer.Option(None, "--chains", help="Independent chains; chain k is seeded with seed + k")


def _workers_option() -> Any:
    return typer.Option(None, "--workers", help="Worker processes running chains")


def _stop_rule_option() -> Any:
    return typer.Option(None, "--stop-rule", help="two-orthants, stochastic, or fixed")


def _report_chains(reports: Sequence[ChainReport]) -> None:
    for report in reports:
        rates = ", ".join(f"{name}={rate:.2f}" for name, rate in sorted(report.acceptance.items()))
        info(f"chain {report.chain_id}: {report.retained} draws in {report.wall_time_seconds:.1f}s ({rates})")


def _finish(code: int) -> None:
    if code != EXIT_OK:
        raise typer.Exit(code=code)


@app.command()
def version() -> None:
    """Show the current version."""
    print(f"[bold cyan]sphcov v{__version__}[/]")


@app.command("gen-periodic")
def gen_periodic(
    config_path: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    dim: Optional[int] = typer.Option(None, "--dim", "-d", help="Channels D"),
    trials: Optional[int] = typer.Option(None, "--trials", "-m", help="Trials M"),
    times: Optional[int] = typer.Option(None, "--times", "-n", help="Time points N"),
    sparse: bool = typer.Option(False, "--sparse", help="Identity correlation except the first and last pair"),
    out: Path = _out_option("periodic"),
) -> None:
    """Generate trial data and truth grids from the periodic process."""
    options = CommandOptions(config_path=config_path, seed=seed, dim=dim, trials=trials, times=times, sparse=sparse)

    def body() -> int:
        config = resolve_config(options)
        paths = generate_periodic_dataset(config, out)
        for path in paths:
            success(f"Wrote {escape(str(path))}")
        return EXIT_OK

    _finish(run_with_exit_codes(body, "generate periodic data"))


@app.command("validate-iw")
def validate_iw_command(
    config_path: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    iters: Optional[int] = _iters_option(),
    burnin: Optional[int] = _burnin_option(),
    thin: Optional[int] = _thin_option(),
    chains: Optional[int] = _chains_option(),
    workers: Optional[int] = _workers_option(),
    dim: Optional[int] = typer.Option(None, "--dim", "-d", help="Dimension D of the desk-scale data"),
    stop_rule: Optional[str] = _stop_rule_option(),
    out: Path = _out_option("validate-iw"),
) -> None:
    """Check the inverse-Wishart chain against exact conjugate draws with two-sample KS tests.

    Exit codes: 0 = every KS statistic within the threshold, 2 = at least one is not.
    """
    options = CommandOptions(
        config_path=config_path,
        seed=seed,
        iters=iters,
        burnin=burnin,
        thin=thin,
        chains=chains,
        workers=workers,
        dim=dim,
        stop_rule=stop_rule,
    )

    def body() -> int:
        config = resolve_config(options)
        report = validate_iw(config, out)
        for row in report.table.itertuples(index=False):
            color = "green" if row.passed else "red"
            print(f"  [{color}]{row.entry}[/]  D={row.statistic:.4f}  p={row.pvalue:.3f}")
        if report.passed:
            success(f"All KS statistics <= {report.threshold}")
            return EXIT_OK
        warn(f"Some KS statistics exceed {report.threshold}")
        return EXIT_VALIDATION_FAILED

    _finish(run_with_exit_codes(body, "validate the inverse-Wishart sampler"))


@app.command("fit-static")
def fit_static_command(
    data: Optional[Path] = typer.Option(
        None, "--data", help="Trial CSV; omitted means desk-scale data drawn from the seed"
    ),
    config_path: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    iters: Optional[int] = _iters_option(),
    burnin: Optional[int] = _burnin_option(),
    thin: Optional[int] = _thin_option(),
    chains: Optional[int] = _chains_option(),
    workers: Optional[int] = _workers_option(),
    prior: Optional[str] = typer.Option(None, "--prior", "-p", help="iw, sqdir, vmf, or bingham"),
    stop_rule: Optional[str] = _stop_rule_option(),
    out: Path = _out_option("static"),
) -> None:
    """Fit the static normal model for one covariance matrix."""
    options = CommandOptions(
        config_path=config_path,
        seed=seed,
        iters=iters,
        burnin=burnin,
        thin=thin,
        chains=chains,
        workers=workers,
        prior=prior,
        stop_rule=stop_rule,
    )

    def body() -> int:
        config = resolve_config(options)
        reports = fit_static(config, out, data)
        _report_chains(reports)
        success(f"Archive written to {escape(str(out))}")
        return EXIT_OK

    _finish(run_with_exit_codes(body, "fit static model"))


@app.command("fit-dynamic")
def fit_dynamic_command(
    data: Path = typer.Argument(..., help="Trial CSV (trial, time_index, time, channel, value)"),
    config_path: Optional[Path] = _config_option(),
    seed: Optional[int] = _seed_option(),
    iters: Optional[int] = _iters_option(),
    burnin: Optional[int] = _burnin_option(),
    thin: Optional[int] = _thin_option(),
    chains: Optional[int] = _chains_option(),
    workers: Optional[int] = _workers_option(),
    band: Optional[int] = typer.Option(None, "--band", "-w", help="Keep Cholesky entries with i - j < W"),
    stop_rule: Optional[str] = _stop_rule_option(),
    fix_mean: bool = typer.Option(False, "--fix-mean", help="Plug in the empirical mean instead of sampling it"),
    fix_variance: bool = typer.Option(
        False, "--fix-variance", help="Plug in the empirical log-sd instead of sampling it"
    ),
    truth: Optional[Path] = typer.Option(None, "--truth", help="Truth CSV for coverage columns"),
    out: Path = _out_option("dynamic"),
) -> None:
    """Fit the dynamic correlation model to trial data."""
    options = CommandOptions(
        config_path=config_path,
        seed=seed,
        iters=iters,
        burnin=burnin,
        thin=thin,
        chains=chains,
        workers=workers,
        band=band,
        stop_rule=stop_rule,
        fix_mean=fix_mean,
        fix_variance=fix_variance,
    )

    def body() -> int:
        config = resolve_config(options)
        reports = fit_dynamic(config, data, out, truth)
        _report_chains(reports)
        success(f"Archive written to {escape(str(out))}")
        return EXIT_OK

    _finish(run_with_exit_codes(body, "fit dynamic model"))


@app.command()
def summarize(
    archive: Path = typer.Argument(..., help="Archive directory written by a fit command"),
    truth: Optional[Path] = typer.Option(None, "--truth", help="Truth CSV for coverage columns"),
) -> None:
    """Recompute summary CSVs from archived draws without rerunning chains."""

    def body() -> int:
        for path in summarize_archive(archive, truth):
            success(f"Wrote {escape(str(path))}")
        return EXIT_OK

    _finish(run_with_exit_codes(body, "summarize archive"))


@app.command()
def compare(
    first: Path = typer.Argument(..., help="First dynamic archive"),
    second: Path = typer.Argument(..., help="Second dynamic archive over the same grid"),
    out: Path = typer.Option(Path(COMPARE_NAME), "--out", "-o", help="Output CSV"),
) -> None:
    """Frobenius distance between the correlation processes of two archives."""

    def body() -> int:
        path = compare_archives(first, second, out)
        success(f"Wrote {escape(str(path))}")
        return EXIT_OK

    _finish(run_with_exit_codes(body, "compare archives"))


def main() -> None:
    """Run the Typer application when executed as a script."""
    app(prog_name="sphcov")


if __name__ == "__main__":
    main()
