"""Pointwise posterior summaries and distance curves between correlation processes."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from src.utils.errors import DimensionMismatchError, TooFewSamplesError
from src.utils.types import FloatArray, IntArray

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100
QUANTILES = (0.025, 0.975)


@dataclass(frozen=True, eq=False)
class ProcessSummary:
    """Posterior mean and 95% band of one process; every array is (N, K)."""

    name: str
    mean: FloatArray
    lower: FloatArray
    upper: FloatArray
    truth: FloatArray | None = None

    @property
    def width(self) -> FloatArray:
        return self.upper - self.lower

    def coverage(self) -> float | None:
        if self.truth is None:
            return None
        inside = (self.lower <= self.truth) & (self.truth <= self.upper)
        return float(np.mean(inside))

    def mise(self) -> float | None:
        """Squared error of the posterior mean, summed over components and averaged over the grid."""
        if self.truth is None:
            return None
        return float(np.mean(np.sum((self.mean - self.truth) ** 2, axis=1)))


@dataclass(frozen=True, eq=False)
class PosteriorSummary:
    processes: dict[str, ProcessSummary] = field(default_factory=dict)

    def coverage(self) -> dict[str, float]:
        return {name: value for name, p in self.processes.items() if (value := p.coverage()) is not None}

    def mise(self) -> dict[str, float]:
        return {name: value for name, p in self.processes.items() if (value := p.mise()) is not None}


def pointwise_summary(draws: FloatArray, name: str = "", truth: FloatArray | None = None) -> ProcessSummary:
    """Summarize (S, N, K) draws into mean and 2.5% / 97.5% quantiles."""
    draws = np.asarray(draws, dtype=np.float64)
    if draws.ndim != 3:
        raise DimensionMismatchError("Draws must be (samples, time, components)", {"ndim": draws.ndim})
    if draws.shape[0] < MIN_SAMPLES:
        raise TooFewSamplesError(
            "Not enough retained samples to summarize", {"process": name, "samples": draws.shape[0]}
        )
    if truth is not None and np.shape(truth) != draws.shape[1:]:
        raise DimensionMismatchError("Truth and draws differ in shape", {"process": name})
    lower, upper = np.quantile(draws, QUANTILES, axis=0)
    return ProcessSummary(name, draws.mean(axis=0), lower, upper, None if truth is None else np.asarray(truth))


def summarize_posterior(
    samples: Mapping[str, FloatArray], truth: Mapping[str, FloatArray] | None = None
) -> PosteriorSummary:
    """Summaries for every process in `samples`; truth is matched by name when given."""
    truth = truth or {}
    processes = {name: pointwise_summary(draws, name, truth.get(name)) for name, draws in samples.items()}
    summary = PosteriorSummary(processes)
    if summary.coverage():
        logger.debug(f"Coverage: {summary.coverage()}")
    return summary


def frobenius_distance_curve(corr_a: FloatArray, corr_b: FloatArray) -> FloatArray:
    """||P_a(t) - P_b(t)||_F for (N, D, D) processes."""
    if np.shape(corr_a) != np.shape(corr_b):
        raise DimensionMismatchError("Processes differ in shape", {"a": str(np.shape(corr_a)), "b": str(np.shape(corr_b))})
    return np.asarray(np.linalg.norm(np.asarray(corr_a) - np.asarray(corr_b), ord="fro", axis=(-2, -1)))


def spectral_error_curve(corr_hat: FloatArray, corr_true: FloatArray) -> FloatArray:
    """||P_hat(t) - P(t)||_2 for (N, D, D) processes."""
    if np.shape(corr_hat) != np.shape(corr_true):
        raise DimensionMismatchError("Processes differ in shape")
    return np.asarray(np.linalg.norm(np.asarray(corr_hat) - np.asarray(corr_true), ord=2, axis=(-2, -1)))


def correlation_error_curves(
    corr: ProcessSummary, dim: int, rows: IntArray, cols: IntArray
) -> dict[str, FloatArray] | None:
    """Spectral and Frobenius error of the posterior mean correlation against truth, per time point."""
    if corr.truth is None:
        return None
    estimate = pairs_to_matrices(corr.mean, dim, rows, cols)
    truth = pairs_to_matrices(corr.truth, dim, rows, cols)
    return {
        "spectral_error": spectral_error_curve(estimate, truth),
        "frobenius_error": frobenius_distance_curve(estimate, truth),
    }


def paired_frobenius_band(draws_a: FloatArray, draws_b: FloatArray) -> ProcessSummary:
    """Frobenius distance between paired (S, N, D, D) draws, summarized over draws as (N, 1)."""
    count = min(np.shape(draws_a)[0], np.shape(draws_b)[0])
    distances = frobenius_distance_curve(np.asarray(draws_a)[:count], np.asarray(draws_b)[:count])
    return pointwise_summary(distances[:, :, None], "frobenius")


def pairs_to_matrices(pairs: FloatArray, dim: int, rows: IntArray, cols: IntArray) -> FloatArray:
    """Expand (..., P) correlation pairs to (..., D, D) matrices with a unit diagonal."""
    pairs = np.asarray(pairs, dtype=np.float64)
    out = np.zeros(pairs.shape[:-1] + (dim, dim))
    out[..., np.arange(dim), np.arange(dim)] = 1.0
    out[..., rows, cols] = pairs
    out[..., cols, rows] = pairs
    return out
