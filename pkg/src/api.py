"""Public API for sphcov workflows.

Every function takes a validated `ExperimentConfig` and an output directory,
writes plot-ready CSVs plus JSON manifests, and returns the paths or report
it produced. Chain k of a run is seeded with `seed + k`.
"""

import logging
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from src.geometry.layout import RowLayout
from src.gp.densities import HyperPrior
from src.io.archive import (
    draws_frame,
    merge_chains,
    process_components,
    read_archive,
    read_truth,
    upper_components,
    write_chain,
    write_frame,
    write_grid,
    write_manifest,
    write_summaries,
    write_truth,
)
from src.io.tensors import TrialTensor, read_trial_tensor, write_trial_tensor
from src.model.dto.archive import ArchiveKind, ArchiveManifest
from src.model.dto.experiment import ExperimentConfig, PriorKind
from src.models.dynamic import DynamicCorrModel, run_dynamic_chain
from src.models.periodic import generate_periodic
from src.models.schedule import ChainSchedule
from src.models.static import StaticNiwModel, iw_direct_posterior, row_priors_for, run_static_chain
from src.models.summary import (
    MIN_SAMPLES,
    frobenius_distance_curve,
    paired_frobenius_band,
    pairs_to_matrices,
    summarize_posterior,
)
from src.utils.error_handling import ensure_directory_exists, error_context
from src.utils.errors import DimensionMismatchError
from src.utils.logger import warn
from src.utils.types import FloatArray

__all__ = [
    "ChainReport",
    "KsReport",
    "compare_archives",
    "desk_scale_data",
    "fit_dynamic",
    "fit_static",
    "generate_periodic_dataset",
    "summarize_archive",
    "validate_iw",
]

logger = logging.getLogger(__name__)

DATA_NAME = "data.csv"
TRUTH_NAME = "truth.csv"
KS_TABLE_NAME = "ks_table.csv"
DIRECT_NAME = "direct_samples.csv"
COMPARE_NAME = "compare.csv"


@dataclass(frozen=True)
class ChainReport:
    chain_id: int
    acceptance: dict[str, float]
    wall_time_seconds: float
    retained: int


@dataclass(frozen=True, eq=False)
class KsReport:
    table: pd.DataFrame
    threshold: float

    @property
    def passed(self) -> bool:
        return bool((self.table["statistic"] <= self.threshold).all())


def _data_rng(seed: int) -> np.random.Generator:
    """Stream for generated inputs, independent of every chain stream."""
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])


def _run_manifest(kind: ArchiveKind, config: ExperimentConfig, shapes: dict[str, int]) -> ArchiveManifest:
    return ArchiveManifest(kind=kind, seed=config.seed, config=config.echo(), shapes=shapes)


def _run_chains(
    job: Callable[..., ChainReport], payloads: Sequence[tuple[object, ...]], workers: int
) -> list[ChainReport]:
    if workers <= 1 or len(payloads) <= 1:
        return [job(*payload) for payload in payloads]
    with ProcessPoolExecutor(max_workers=min(workers, len(payloads))) as pool:
        futures = [pool.submit(job, *payload) for payload in payloads]
        return [future.result() for future in futures]


def generate_periodic_dataset(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Write data.csv, truth.csv and a manifest for the (sparse) periodic process."""
    ensure_directory_exists(out_dir)
    with error_context("generate periodic data", dim=config.dim, trials=config.trials, times=config.times):
        tensor, truth = generate_periodic(
            config.dim, config.trials, config.times, config.time_range, _data_rng(config.seed), config.sparse
        )
    shapes = {"trials": config.trials, "times": config.times, "dim": config.dim}
    return [
        write_trial_tensor(out_dir / DATA_NAME, tensor),
        write_truth(out_dir / TRUTH_NAME, truth),
        write_manifest(out_dir, _run_manifest(ArchiveKind.PERIODIC, config, shapes)),
    ]


def desk_scale_data(config: ExperimentConfig) -> TrialTensor:
    """N draws from N(0, (I + 11^T) / 11) in D dimensions."""
    dim = config.dim
    sigma0 = (np.eye(dim) + np.ones((dim, dim))) / 11.0
    values = _data_rng(config.seed).multivariate_normal(np.zeros(dim), sigma0, size=config.n_obs)
    return TrialTensor(values[None], np.arange(1.0, config.n_obs + 1.0))


def _static_model(config: ExperimentConfig, data: FloatArray, prior: PriorKind) -> StaticNiwModel:
    dim = data.shape[1]
    return StaticNiwModel(
        data=data,
        psi=config.psi_scale * np.eye(dim),
        nu=config.nu if config.nu is not None else float(dim),
        mu0=np.zeros(dim),
        prior_kind=prior,
        row_priors=row_priors_for(prior, dim, config.alpha, config.kappa, config.zeta),
        tau_prior_sd=config.tau_prior_sd,
        tau_jacobian=config.tau_jacobian,
    )


def _static_components(model: StaticNiwModel) -> dict[str, list[str]]:
    components = process_components(RowLayout(model.dim))
    factor = upper_components(model.dim) if model.is_iw else components["chol"]
    return {"sd": components["sd"], "corr": components["corr"], "cov": components["cov"], "factor": factor}


def _static_chain_job(
    model: StaticNiwModel, schedule: ChainSchedule, seed: int, chain_id: int, out_dir: Path, base: ArchiveManifest
) -> ChainReport:
    started = time.perf_counter()
    with error_context("static chain", chain_id=chain_id):
        draws = run_static_chain(model, schedule, np.random.default_rng(seed + chain_id))
    elapsed = time.perf_counter() - started

    layout = RowLayout(model.dim)
    pair_rows, pair_cols = layout.pair_indices()
    entry_rows, entry_cols = layout.entry_indices()
    factor_rows, factor_cols = np.triu_indices(model.dim) if model.is_iw else (entry_rows, entry_cols)
    samples = {
        "sd": draws.sd[:, None, :],
        "corr": draws.corr[:, None, pair_rows, pair_cols],
        "cov": draws.cov[:, None, entry_rows, entry_cols],
        "factor": draws.factor[:, None, factor_rows, factor_cols],
    }
    manifest = base.with_updates(wall_time_seconds=elapsed, acceptance=draws.acceptance)
    write_chain(out_dir, chain_id, samples, _static_components(model), draws.traces, manifest)
    return ChainReport(chain_id, draws.acceptance, elapsed, draws.retained)


def _fit_static_chains(
    config: ExperimentConfig, model: StaticNiwModel, out_dir: Path, kind: ArchiveKind
) -> list[ChainReport]:
    shapes = {"dim": model.dim, "n_obs": model.n_obs, "times": 1, "retained": config.retained}
    base = _run_manifest(kind, config, shapes)
    ensure_directory_exists(out_dir)
    write_manifest(out_dir, base)
    write_grid(out_dir, np.zeros(1))
    schedule = ChainSchedule.from_config(config)
    payloads = [(model, schedule, config.seed, k, out_dir, base) for k in range(config.chains)]
    return _run_chains(_static_chain_job, payloads, config.workers)


def _load_static_data(config: ExperimentConfig, data_path: Path | None) -> FloatArray:
    tensor = desk_scale_data(config) if data_path is None else read_trial_tensor(data_path)
    return tensor.observations()


def fit_static(config: ExperimentConfig, out_dir: Path, data_path: Path | None = None) -> list[ChainReport]:
    """Fit the static model; without a data file the desk-scale data set is drawn from the seed."""
    data = _load_static_data(config, data_path)
    model = _static_model(config, data, config.prior)
    reports = _fit_static_chains(config, model, out_dir, ArchiveKind.STATIC)
    _summarize_if_enough(out_dir, reports)
    return reports


def validate_iw(config: ExperimentConfig, out_dir: Path) -> KsReport:
    """Compare the sampled inverse-Wishart posterior with exact conjugate draws, entry by entry."""
    data = _load_static_data(config, None)
    model = _static_model(config, data, PriorKind.IW)
    reports = _fit_static_chains(config, model, out_dir, ArchiveKind.VALIDATE_IW)
    _, chains, _ = read_archive(out_dir)
    merged, components = merge_chains(chains)
    chain_cov = merged["cov"][:, 0, :]

    count = chain_cov.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(2)[1])
    rows, cols = RowLayout(model.dim).entry_indices()
    with error_context("direct inverse-Wishart draws", count=count):
        direct = np.stack([iw_direct_posterior(data, model.psi, model.nu, model.mu0, rng) for _ in range(count)])
    direct_cov = direct[:, rows, cols]
    write_frame(out_dir / DIRECT_NAME, draws_frame(direct_cov[:, None, :], components["cov"]))

    records = []
    for k, name in enumerate(components["cov"]):
        result = stats.ks_2samp(chain_cov[:, k], direct_cov[:, k])
        statistic = float(result.statistic)
        records.append(
            {
                "entry": name,
                "statistic": statistic,
                "pvalue": float(result.pvalue),
                "passed": statistic <= config.ks_threshold,
            }
        )
    table = pd.DataFrame.from_records(records)
    write_frame(out_dir / KS_TABLE_NAME, table)
    logger.debug(f"KS table over {count} draws from {len(reports)} chain(s):\n{table}")
    return KsReport(table, config.ks_threshold)


def _dynamic_chain_job(
    model: DynamicCorrModel, schedule: ChainSchedule, seed: int, chain_id: int, out_dir: Path, base: ArchiveManifest
) -> ChainReport:
    started = time.perf_counter()
    with error_context("dynamic chain", chain_id=chain_id):
        draws = run_dynamic_chain(model, schedule, np.random.default_rng(seed + chain_id))
    elapsed = time.perf_counter() - started
    samples = {"mean": draws.mu, "sd": draws.sd, "corr": draws.corr, "cov": draws.cov, "chol": draws.chol}
    manifest = base.with_updates(wall_time_seconds=elapsed, acceptance=draws.acceptance)
    write_chain(out_dir, chain_id, samples, process_components(model.layout), draws.traces, manifest)
    return ChainReport(chain_id, draws.acceptance, elapsed, draws.retained)


def _dynamic_model(config: ExperimentConfig, tensor: TrialTensor) -> DynamicCorrModel:
    hyper = tuple(
        HyperPrior(a, b, m, v) for a, b, m, v in zip(config.hyper_a, config.hyper_b, config.hyper_m, config.hyper_v)
    )
    return DynamicCorrModel(
        data=tensor,
        hyper=(hyper[0], hyper[1], hyper[2]),
        smoothness=config.smoothness,
        band=config.band,
        sample_mean=config.sample_mean,
        sample_variance=config.sample_variance,
        nugget=config.nugget,
    )


def fit_dynamic(
    config: ExperimentConfig, data_path: Path, out_dir: Path, truth_path: Path | None = None
) -> list[ChainReport]:
    tensor = read_trial_tensor(data_path)
    model = _dynamic_model(config, tensor)
    trials, n_times, dim = tensor.shape
    shapes = {"trials": trials, "times": n_times, "dim": dim, "band": model.layout.band, "retained": config.retained}
    base = _run_manifest(ArchiveKind.DYNAMIC, config, shapes)
    ensure_directory_exists(out_dir)
    write_manifest(out_dir, base)
    write_grid(out_dir, tensor.times)

    schedule = ChainSchedule.from_config(config)
    payloads = [(model, schedule, config.seed, k, out_dir, base) for k in range(config.chains)]
    reports = _run_chains(_dynamic_chain_job, payloads, config.workers)
    _summarize_if_enough(out_dir, reports, truth_path)
    return reports


def _summarize_if_enough(out_dir: Path, reports: Sequence[ChainReport], truth_path: Path | None = None) -> None:
    total = sum(report.retained for report in reports)
    if total < MIN_SAMPLES:
        warn(f"Only {total} retained draws; skipping summaries (need {MIN_SAMPLES})")
        return
    summarize_archive(out_dir, truth_path)


def summarize_archive(out_dir: Path, truth_path: Path | None = None) -> list[Path]:
    """Recompute summary CSVs from archived draws of every chain."""
    _, chains, times = read_archive(out_dir)
    merged, components = merge_chains(chains)
    truth = read_truth(truth_path, components) if truth_path is not None else None
    with error_context("summarize posterior", archive=str(out_dir)):
        summary = summarize_posterior(merged, truth)
    return write_summaries(out_dir, summary, components, times)


def _correlation_draws(out_dir: Path) -> tuple[FloatArray, FloatArray]:
    manifest, chains, times = read_archive(out_dir)
    merged, _ = merge_chains(chains)
    layout = RowLayout(manifest.shapes["dim"], manifest.shapes.get("band"))
    rows, cols = layout.pair_indices()
    return pairs_to_matrices(merged["corr"], layout.dim, rows, cols), times


def compare_archives(first: Path, second: Path, out_path: Path) -> Path:
    """Frobenius distance between two posterior correlation processes over a shared grid."""
    draws_a, times_a = _correlation_draws(first)
    draws_b, times_b = _correlation_draws(second)
    if draws_a.shape[1:] != draws_b.shape[1:] or not np.allclose(times_a, times_b):
        raise DimensionMismatchError(
            "Archives differ in grid or dimension", {"first": str(draws_a.shape[1:]), "second": str(draws_b.shape[1:])}
        )
    band = paired_frobenius_band(draws_a, draws_b)
    frame = pd.DataFrame(
        {
            "time_index": np.arange(1, times_a.size + 1),
            "time": times_a,
            "frobenius_of_means": frobenius_distance_curve(draws_a.mean(axis=0), draws_b.mean(axis=0)),
            "frobenius_mean": band.mean[:, 0],
            "frobenius_q025": band.lower[:, 0],
            "frobenius_q975": band.upper[:, 0],
        }
    )
    return write_frame(out_path, frame)
