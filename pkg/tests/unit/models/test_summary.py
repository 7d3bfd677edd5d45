import numpy as np
import pytest

from src.models.summary import (
    MIN_SAMPLES,
    ProcessSummary,
    correlation_error_curves,
    frobenius_distance_curve,
    paired_frobenius_band,
    pairs_to_matrices,
    pointwise_summary,
    spectral_error_curve,
    summarize_posterior,
)
from src.utils.errors import DimensionMismatchError, TooFewSamplesError


def test_constant_chain_has_a_zero_width_band():
    draws = np.full((MIN_SAMPLES, 4, 2), 0.3)
    summary = pointwise_summary(draws, "mean", truth=np.full((4, 2), 0.3))
    np.testing.assert_allclose(summary.mean, 0.3)
    np.testing.assert_allclose(summary.width, 0.0, atol=1e-15)
    assert summary.coverage() == 1.0
    assert summary.mise() == pytest.approx(0.0)


def test_quantiles_of_an_even_grid():
    draws = np.linspace(0.0, 1.0, 1001)[:, None, None] * np.ones((1, 3, 1))
    summary = pointwise_summary(draws)
    np.testing.assert_allclose(summary.lower, 0.025)
    np.testing.assert_allclose(summary.upper, 0.975)


def test_too_few_samples():
    with pytest.raises(TooFewSamplesError):
        pointwise_summary(np.zeros((MIN_SAMPLES - 1, 2, 2)))


def test_truth_shape_must_match():
    with pytest.raises(DimensionMismatchError):
        pointwise_summary(np.zeros((MIN_SAMPLES, 2, 2)), truth=np.zeros((3, 2)))


def test_summary_reports_coverage_only_for_processes_with_truth():
    rng = np.random.default_rng(0)
    samples = {"mean": rng.normal(size=(400, 5, 2)), "sd": rng.normal(size=(400, 5, 2))}
    summary = summarize_posterior(samples, {"mean": np.zeros((5, 2))})
    assert set(summary.coverage()) == {"mean"}
    assert summary.coverage()["mean"] == 1.0
    assert set(summary.processes) == {"mean", "sd"}


def test_distance_curves():
    identity = np.broadcast_to(np.eye(3), (4, 3, 3))
    np.testing.assert_allclose(frobenius_distance_curve(identity, identity), 0.0)
    shifted = identity + np.diag([1.0, 0.0, 0.0])
    np.testing.assert_allclose(spectral_error_curve(shifted, identity), 1.0)
    with pytest.raises(DimensionMismatchError):
        frobenius_distance_curve(identity, identity[:2])


def test_paired_band_summarizes_per_time():
    rng = np.random.default_rng(1)
    first = rng.normal(size=(120, 6, 2, 2))
    band = paired_frobenius_band(first, first[:110])
    assert band.mean.shape == (6, 1)
    np.testing.assert_allclose(band.upper, 0.0)


def test_pairs_expand_to_symmetric_matrices():
    rows, cols = np.tril_indices(3, -1)
    matrices = pairs_to_matrices(np.array([[0.1, 0.2, 0.3]]), 3, rows, cols)
    expected = np.array([[1.0, 0.1, 0.2], [0.1, 1.0, 0.3], [0.2, 0.3, 1.0]])
    np.testing.assert_allclose(matrices[0], expected)


def test_correlation_error_curves_against_truth():
    rows, cols = np.array([1]), np.array([0])
    estimate = np.full((3, 1), 0.5)
    corr = ProcessSummary("corr", estimate, estimate, estimate, truth=np.full((3, 1), 0.2))
    curves = correlation_error_curves(corr, 2, rows, cols)
    np.testing.assert_allclose(curves["spectral_error"], 0.3)
    np.testing.assert_allclose(curves["frobenius_error"], 0.3 * np.sqrt(2))
    assert correlation_error_curves(ProcessSummary("corr", estimate, estimate, estimate), 2, rows, cols) is None
