"""Synthetic trial data from a periodic mean and covariance process.

mu_i(t) = sin(i pi t / D)
L_ij(t) = (-1)^i sin(i pi t / D) (-1)^j cos(j pi t / D), j <= i
Sigma(t) = (L(t) L(t)^T) o S with S_ij = 1 / (|i - j| + 1)

Sigma(t) is singular at isolated t (all of L vanishes at t = 0), so the
generator adds REGULARIZATION * I before factorizing.
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.io.tensors import TrialTensor
from src.utils.errors import InvalidConfigError
from src.utils.types import FloatArray

logger = logging.getLogger(__name__)

REGULARIZATION = 1e-8


@dataclass(frozen=True, eq=False)
class TruthRecord:
    """True processes on the grid: mean and sd are (N, D), cov and corr (N, D, D)."""

    times: FloatArray
    mean: FloatArray
    sd: FloatArray
    cov: FloatArray
    corr: FloatArray

    @property
    def dim(self) -> int:
        return int(self.mean.shape[1])


def periodic_mean(dim: int, times: FloatArray) -> FloatArray:
    index = np.arange(1, dim + 1)
    return np.sin(np.outer(times, index) * np.pi / dim)


def periodic_cov(dim: int, times: FloatArray) -> FloatArray:
    """Sigma(t) for every t, before regularization."""
    index = np.arange(1, dim + 1)
    angle = np.outer(times, index) * np.pi / dim
    sign = (-1.0) ** index
    left = sign * np.sin(angle)
    right = sign * np.cos(angle)
    factor = np.tril(left[:, :, None] * right[:, None, :])
    schur = 1.0 / (np.abs(index[:, None] - index[None, :]) + 1.0)
    return np.asarray(factor @ np.swapaxes(factor, -1, -2) * schur)


def _truth(times: FloatArray, mean: FloatArray, cov: FloatArray) -> TruthRecord:
    sd = np.sqrt(np.einsum("nii->ni", cov))
    corr = cov / (sd[:, :, None] * sd[:, None, :])
    return TruthRecord(times, mean, sd, cov, corr)


def periodic_truth(dim: int, times: FloatArray) -> TruthRecord:
    times = np.asarray(times, dtype=np.float64)
    cov = periodic_cov(dim, times) + REGULARIZATION * np.eye(dim)
    return _truth(times, periodic_mean(dim, times), cov)


def sparse_periodic_truth(dim: int, times: FloatArray) -> TruthRecord:
    """Unit variances and zero mean; only the pairs (1, 2) and (D - 1, D) correlate."""
    if dim < 4:
        raise InvalidConfigError("The sparse periodic process needs D >= 4", {"dim": dim})
    times = np.asarray(times, dtype=np.float64)
    rho = periodic_truth(2, times).corr[:, 1, 0]
    corr = np.broadcast_to(np.eye(dim), (times.size, dim, dim)).copy()
    for i, j in ((1, 0), (dim - 1, dim - 2)):
        corr[:, i, j] = rho
        corr[:, j, i] = rho
    return TruthRecord(times, np.zeros((times.size, dim)), np.ones((times.size, dim)), corr, corr.copy())


def generate_periodic(
    dim: int,
    trials: int,
    n_times: int,
    t_range: tuple[float, float],
    rng: np.random.Generator,
    sparse: bool = False,
) -> tuple[TrialTensor, TruthRecord]:
    """Draw `trials` independent trajectories on an evenly spaced grid over `t_range`."""
    if dim < 1 or trials < 1 or n_times < 2:
        raise InvalidConfigError("Need D >= 1, M >= 1 and N >= 2", {"dim": dim, "trials": trials, "n": n_times})
    start, end = t_range
    if not end > start:
        raise InvalidConfigError("Time range must be increasing", {"start": start, "end": end})
    times = np.linspace(start, end, n_times)
    truth = sparse_periodic_truth(dim, times) if sparse else periodic_truth(dim, times)

    cov = truth.cov + REGULARIZATION * np.eye(dim) if sparse else truth.cov
    lower = np.linalg.cholesky(cov)
    noise = rng.standard_normal((trials, n_times, dim))
    values = truth.mean[None] + np.einsum("nij,mnj->mni", lower, noise)
    logger.debug(f"Generated periodic data: D={dim}, M={trials}, N={n_times}, sparse={sparse}")
    return TrialTensor(values, times), truth
