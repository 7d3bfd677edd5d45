"""Sample archives: per-chain wide CSVs of retained draws plus JSON manifests.

Layout of an archive directory:

    manifest.json          run-level manifest (kind, seed, config, shapes)
    grid.csv               time_index, time
    chain_<k>/manifest.json
    chain_<k>/<process>.csv   one row per retained draw, columns t<n>_<component>
    chain_<k>/traces.csv      per-iteration acceptance, step sizes, hyperparameters
    summary_<process>.csv  written by summarize
"""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.geometry.layout import RowLayout
from src.model.dto.archive import MANIFEST_NAME, ArchiveManifest
from src.models.periodic import TruthRecord
from src.models.summary import PosteriorSummary, correlation_error_curves
from src.utils.error_handling import ensure_directory_exists, safe_file_read, safe_file_write
from src.utils.errors import FileOperationError, InvalidConfigError
from src.utils.types import FloatArray, IntArray

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
GRID_NAME = "grid.csv"
TRACES_NAME = "traces.csv"
METRICS_NAME = "summary_metrics.csv"
ERRORS_NAME = "summary_errors.csv"


def chain_dir(out_dir: Path, chain_id: int) -> Path:
    return out_dir / f"chain_{chain_id}"


def _pairs(rows: Sequence[int], cols: Sequence[int], prefix: str) -> list[str]:
    return [f"{prefix}{i + 1}_{j + 1}" for i, j in zip(rows, cols)]


def process_components(layout: RowLayout) -> dict[str, list[str]]:
    """Component names per process; correlation and Cholesky entries follow the band."""
    channels = [f"c{k + 1}" for k in range(layout.dim)]
    pair_rows, pair_cols = layout.pair_indices()
    entry_rows, entry_cols = layout.entry_indices()
    return {
        "mean": channels,
        "sd": channels,
        "corr": _pairs(pair_rows.tolist(), pair_cols.tolist(), "r"),
        "cov": _pairs(entry_rows.tolist(), entry_cols.tolist(), "s"),
        "chol": _pairs(entry_rows.tolist(), entry_cols.tolist(), "l"),
    }


def pair_positions(names: Sequence[str]) -> tuple[IntArray, IntArray]:
    """Zero-based (row, col) of pair names such as r3_1."""
    pairs = [name[1:].split("_") for name in names]
    rows = np.array([int(i) - 1 for i, _ in pairs], dtype=np.int64)
    cols = np.array([int(j) - 1 for _, j in pairs], dtype=np.int64)
    return rows, cols


def upper_components(dim: int) -> list[str]:
    rows, cols = np.triu_indices(dim)
    return _pairs(rows.tolist(), cols.tolist(), "u")


def write_frame(path: Path, frame: pd.DataFrame) -> Path:
    ensure_directory_exists(path.parent)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise FileOperationError(f"Failed to write {path}: {e}") from e
    return path


def read_frame(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileOperationError(f"Failed to read {path}: {e}") from e


def draws_frame(draws: FloatArray, components: Sequence[str]) -> pd.DataFrame:
    """(S, N, K) draws as a wide frame, time-major columns t<n>_<component>."""
    count, n_times, width = draws.shape
    if width != len(components):
        raise InvalidConfigError("Component names do not match the draws", {"width": width, "names": len(components)})
    columns = [f"t{n + 1}_{name}" for n in range(n_times) for name in components]
    frame = pd.DataFrame(draws.reshape(count, n_times * width), columns=columns)
    frame.insert(0, "draw", np.arange(1, count + 1))
    return frame


def frame_draws(frame: pd.DataFrame, n_times: int) -> tuple[FloatArray, list[str]]:
    values = frame.drop(columns="draw").to_numpy(dtype=np.float64)
    width = values.shape[1] // n_times
    names = [column.split("_", 1)[1] for column in frame.columns[1 : width + 1]]
    return values.reshape(values.shape[0], n_times, width), names


def write_manifest(directory: Path, manifest: ArchiveManifest) -> Path:
    path = directory / MANIFEST_NAME
    safe_file_write(path, manifest.to_json())
    return path


def read_manifest(directory: Path) -> ArchiveManifest:
    return ArchiveManifest.from_json(safe_file_read(directory / MANIFEST_NAME))


def write_grid(out_dir: Path, times: FloatArray) -> Path:
    frame = pd.DataFrame({"time_index": np.arange(1, len(times) + 1), "time": np.asarray(times, dtype=np.float64)})
    return write_frame(out_dir / GRID_NAME, frame)


def read_grid(out_dir: Path) -> FloatArray:
    return read_frame(out_dir / GRID_NAME)["time"].to_numpy(dtype=np.float64)


@dataclass(frozen=True, eq=False)
class ChainArchive:
    chain_id: int
    samples: dict[str, FloatArray]
    components: dict[str, list[str]]
    manifest: ArchiveManifest


def write_chain(
    out_dir: Path,
    chain_id: int,
    samples: Mapping[str, FloatArray],
    components: Mapping[str, Sequence[str]],
    traces: Mapping[str, FloatArray],
    manifest: ArchiveManifest,
) -> Path:
    """Write one chain's draws and traces; the manifest records the row count of every file."""
    directory = chain_dir(out_dir, chain_id)
    ensure_directory_exists(directory)
    row_counts = {}
    for name, draws in samples.items():
        write_frame(directory / f"{name}.csv", draws_frame(draws, components[name]))
        row_counts[name] = int(draws.shape[0])
    trace_frame = pd.DataFrame({"iteration": np.arange(1, len(next(iter(traces.values()))) + 1), **traces})
    write_frame(directory / TRACES_NAME, trace_frame)
    write_manifest(directory, manifest.with_updates(chain_id=chain_id, row_counts=row_counts))
    logger.debug(f"Wrote chain {chain_id} to {directory}")
    return directory


def read_chain(directory: Path, n_times: int) -> ChainArchive:
    manifest = read_manifest(directory)
    samples = {}
    components = {}
    for name, rows in manifest.row_counts.items():
        draws, names = frame_draws(read_frame(directory / f"{name}.csv"), n_times)
        if draws.shape[0] != rows:
            raise InvalidConfigError(
                "Sample file row count disagrees with the manifest",
                {"file": str(directory / f"{name}.csv"), "rows": draws.shape[0], "manifest": rows},
            )
        samples[name] = draws
        components[name] = names
    return ChainArchive(int(manifest.chain_id or 0), samples, components, manifest)


def read_archive(out_dir: Path) -> tuple[ArchiveManifest, list[ChainArchive], FloatArray]:
    """Run manifest, every chain in id order, and the time grid."""
    manifest = read_manifest(out_dir)
    times = read_grid(out_dir)
    directories = sorted(
        (path for path in out_dir.glob("chain_*") if path.is_dir()), key=lambda path: int(path.name.split("_")[1])
    )
    if not directories:
        raise FileOperationError(f"No chain directories under {out_dir}")
    return manifest, [read_chain(directory, times.size) for directory in directories], times


def merge_chains(chains: Sequence[ChainArchive]) -> tuple[dict[str, FloatArray], dict[str, list[str]]]:
    """Concatenate draws of every process across chains in chain-id order."""
    first = chains[0]
    merged = {name: np.concatenate([chain.samples[name] for chain in chains]) for name in first.samples}
    return merged, first.components


def write_summaries(
    out_dir: Path,
    summary: PosteriorSummary,
    components: Mapping[str, Sequence[str]],
    times: FloatArray,
) -> list[Path]:
    paths = []
    for name, process in summary.processes.items():
        frame = pd.DataFrame({"time_index": np.arange(1, len(times) + 1), "time": times})
        for k, component in enumerate(components[name]):
            frame[f"{component}_mean"] = process.mean[:, k]
            frame[f"{component}_q025"] = process.lower[:, k]
            frame[f"{component}_q975"] = process.upper[:, k]
            if process.truth is not None:
                frame[f"{component}_truth"] = process.truth[:, k]
        paths.append(write_frame(out_dir / f"summary_{name}.csv", frame))

    coverage = summary.coverage()
    if coverage:
        mise = summary.mise()
        metrics = pd.DataFrame(
            {"process": list(coverage), "coverage": list(coverage.values()), "mise": [mise[n] for n in coverage]}
        )
        paths.append(write_frame(out_dir / METRICS_NAME, metrics))

    corr = summary.processes.get("corr")
    if corr is not None and corr.truth is not None:
        rows, cols = pair_positions(components["corr"])
        curves = correlation_error_curves(corr, len(components["sd"]), rows, cols)
        frame = pd.DataFrame({"time_index": np.arange(1, len(times) + 1), "time": times, **(curves or {})})
        paths.append(write_frame(out_dir / ERRORS_NAME, frame))
    return paths


def truth_frame(truth: TruthRecord) -> pd.DataFrame:
    """Wide truth grid: time_index, time, then <process>_<component> for the full matrices."""
    layout = RowLayout(truth.dim)
    components = process_components(layout)
    pair_rows, pair_cols = layout.pair_indices()
    entry_rows, entry_cols = layout.entry_indices()
    values = {
        "mean": truth.mean,
        "sd": truth.sd,
        "corr": truth.corr[:, pair_rows, pair_cols],
        "cov": truth.cov[:, entry_rows, entry_cols],
    }
    frame = pd.DataFrame({"time_index": np.arange(1, truth.times.size + 1), "time": truth.times})
    columns = {
        f"{process}_{component}": grid[:, k]
        for process, grid in values.items()
        for k, component in enumerate(components[process])
    }
    return pd.concat([frame, pd.DataFrame(columns)], axis=1)


def write_truth(path: Path, truth: TruthRecord) -> Path:
    return write_frame(path, truth_frame(truth))


def read_truth(path: Path, components: Mapping[str, Sequence[str]]) -> dict[str, FloatArray]:
    """Truth grids for every process whose components all appear in the truth file."""
    frame = read_frame(path)
    truth = {}
    for process, names in components.items():
        columns = [f"{process}_{name}" for name in names]
        if all(column in frame.columns for column in columns):
            truth[process] = frame[columns].to_numpy(dtype=np.float64)
    return truth
