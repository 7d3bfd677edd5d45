"""Trial tensors and their long-form CSV representation.

One row per cell: trial, time_index, time, channel, value. Values are written
with 17 significant digits so a written tensor reads back bit for bit.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from src.gp.kernel import TimeGrid
from src.utils.error_handling import ensure_directory_exists
from src.utils.errors import FileOperationError, RaggedDataError
from src.utils.types import FloatArray, IntArray

logger = logging.getLogger(__name__)

TENSOR_COLUMNS = ["trial", "time_index", "time", "channel", "value"]
FLOAT_FORMAT = "%.17g"


@dataclass(frozen=True, eq=False)
class TrialTensor:
    """M trials x N time points x D channels of observations."""

    values: FloatArray
    times: FloatArray
    trial_labels: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    channel_labels: IntArray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64, copy=True)
        times = np.array(self.times, dtype=np.float64, copy=True).ravel()
        if values.ndim != 3:
            raise RaggedDataError("Trial data must be an M x N x D array", {"ndim": values.ndim})
        trials, n_times, dim = values.shape
        if times.size != n_times:
            raise RaggedDataError("One time stamp per time index is required", {"times": times.size, "n": n_times})
        if not np.all(np.isfinite(values)):
            raise RaggedDataError("Trial data contains non-finite values")
        trial_labels = self.trial_labels if len(self.trial_labels) else np.arange(1, trials + 1)
        channel_labels = self.channel_labels if len(self.channel_labels) else np.arange(1, dim + 1)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "trial_labels", np.asarray(trial_labels, dtype=np.int64))
        object.__setattr__(self, "channel_labels", np.asarray(channel_labels, dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int, int]:
        trials, n_times, dim = self.values.shape
        return trials, n_times, dim

    def grid(self) -> TimeGrid:
        return TimeGrid.rescaled(self.times)

    def observations(self) -> FloatArray:
        """All (trial, time) cells as rows of an (M N) x D matrix."""
        return self.values.reshape(-1, self.values.shape[2])


def tensor_frame(tensor: TrialTensor) -> pd.DataFrame:
    trials, n_times, dim = tensor.shape
    trial, time_index, channel = np.meshgrid(np.arange(trials), np.arange(n_times), np.arange(dim), indexing="ij")
    return pd.DataFrame(
        {
            "trial": tensor.trial_labels[trial.ravel()],
            "time_index": time_index.ravel() + 1,
            "time": tensor.times[time_index.ravel()],
            "channel": tensor.channel_labels[channel.ravel()],
            "value": tensor.values.ravel(),
        }
    )


def write_trial_tensor(path: Path, tensor: TrialTensor) -> Path:
    ensure_directory_exists(path.parent)
    try:
        tensor_frame(tensor).to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise FileOperationError(f"Failed to write trial data {path}: {e}") from e
    logger.debug(f"Wrote {tensor.values.size} cells to {path}")
    return path


def read_trial_tensor(path: Path) -> TrialTensor:
    """Read a long-form CSV; every (trial, time_index, channel) cell must appear exactly once."""
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise FileOperationError(f"Failed to read trial data {path}: {e}") from e

    missing = [column for column in TENSOR_COLUMNS if column not in frame.columns]
    if missing:
        raise RaggedDataError("Trial data is missing columns", {"path": str(path), "columns": ", ".join(missing)})
    if frame[["trial", "time_index", "channel"]].duplicated().any():
        raise RaggedDataError("Duplicate (trial, time_index, channel) cells", {"path": str(path)})

    trials = np.sort(frame["trial"].unique())
    time_indices = np.sort(frame["time_index"].unique())
    channels = np.sort(frame["channel"].unique())
    expected = trials.size * time_indices.size * channels.size
    if len(frame) != expected:
        raise RaggedDataError(
            "Trial data does not fill a complete M x N x D grid",
            {"path": str(path), "rows": len(frame), "expected": expected},
        )

    times = frame.groupby("time_index")["time"].agg(["min", "max"]).loc[time_indices]
    if not np.array_equal(times["min"].to_numpy(), times["max"].to_numpy()):
        raise RaggedDataError("A time index maps to more than one time", {"path": str(path)})

    ordered = frame.sort_values(["trial", "time_index", "channel"])
    values = ordered["value"].to_numpy(dtype=np.float64).reshape(trials.size, time_indices.size, channels.size)
    return TrialTensor(values, times["min"].to_numpy(dtype=np.float64), trials, channels)
