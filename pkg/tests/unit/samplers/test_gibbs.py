import numpy as np
import pytest

from src.gp.densities import HyperPrior
from src.gp.kernel import factorize_gram
from src.model.dto.experiment import GpBlock
from src.samplers.gibbs import gibbs_gamma, gibbs_mu, gibbs_mu_by_channel, gp_component_count
from src.utils.errors import DimensionMismatchError, InvalidConfigError


class ZeroNoise:
    """Generator stand-in whose normal draws are zero, exposing the posterior mean."""

    def standard_normal(self, size):
        return np.zeros(size)


class UnitGamma:
    """Records the inverse-gamma shape and returns the scale."""

    def gamma(self, shape):
        self.shape = shape
        return 1.0


@pytest.mark.parametrize(
    ("which", "dim", "expected"),
    [(GpBlock.MEAN, 2, 20), (GpBlock.LOG_SD, 3, 30), (GpBlock.CHOL, 2, 20), (GpBlock.CHOL, 3, 50)],
)
def test_component_counts(which, dim, expected):
    assert gp_component_count(10, dim, which) == expected


def test_posterior_parameters():
    hp = HyperPrior(a=1.0, b=0.1)
    cases = [
        ((4.0, 10, 2, GpBlock.MEAN), None, (11.0, 2.1)),
        ((4.0, 10, 3, GpBlock.CHOL), None, (26.0, 2.1)),
        ((0.0, 10, 3, GpBlock.CHOL), 6, (4.0, 0.1)),
    ]
    for (quad, n_points, dim, which), n_components, (shape, scale) in cases:
        rng = UnitGamma()
        assert gibbs_gamma(quad, n_points, dim, which, hp, rng, n_components=n_components) == pytest.approx(scale)
        assert rng.shape == pytest.approx(shape)


def test_gamma_draws_match_the_inverse_gamma_mean():
    rng = np.random.default_rng(0)
    hp = HyperPrior(a=2.0, b=1.0)
    draws = [gibbs_gamma(6.0, 5, 2, GpBlock.MEAN, hp, rng) for _ in range(20000)]
    # InvGamma(7, 4) has mean 4 / 6
    assert np.mean(draws) == pytest.approx(4.0 / 6.0, rel=0.03)


def test_gamma_rejects_a_negative_quadratic_form():
    with pytest.raises(InvalidConfigError):
        gibbs_gamma(-1.0, 5, 2, GpBlock.MEAN, HyperPrior(), np.random.default_rng(0))


def test_mu_scalar_posterior_mean():
    y = np.array([[[1.0]], [[2.0]], [[3.0]]])
    prior = factorize_gram(np.array([[2.0]]), 0.0)
    covariances = np.array([[[0.5]]])
    mean = gibbs_mu(y, covariances, prior, ZeroNoise())
    # precision 1/2 + 3/0.5, information 6 / 0.5
    assert mean[0, 0] == pytest.approx(12.0 / 6.5)


def test_mu_keeps_channels_and_times_apart():
    y = np.array([[[1.0, -2.0], [3.0, 4.0]]])
    prior = factorize_gram(np.eye(2), 0.0)
    covariances = np.broadcast_to(np.eye(2), (2, 2, 2)).copy()
    mean = gibbs_mu(y, covariances, prior, ZeroNoise())
    np.testing.assert_allclose(mean, y[0] / 2)


def test_mu_concentrates_on_the_sample_mean():
    rng = np.random.default_rng(1)
    truth = np.array([[0.5, -1.0], [1.0, 0.0], [-0.5, 2.0]])
    y = truth + rng.normal(size=(2000, 3, 2))
    prior = factorize_gram(np.eye(3), 0.0)
    covariances = np.broadcast_to(np.eye(2), (3, 2, 2)).copy()
    mean = gibbs_mu(y, covariances, prior, ZeroNoise())
    np.testing.assert_allclose(mean, y.mean(axis=0), atol=0.01)


def test_mu_draw_has_the_data_shape():
    rng = np.random.default_rng(2)
    y = rng.normal(size=(4, 5, 3))
    prior = factorize_gram(np.eye(5), 0.0)
    covariances = np.broadcast_to(np.eye(3), (5, 3, 3)).copy()
    assert gibbs_mu(y, covariances, prior, rng).shape == (5, 3)


def test_mu_rejects_mismatched_covariances():
    y = np.zeros((2, 3, 2))
    prior = factorize_gram(np.eye(3), 0.0)
    with pytest.raises(DimensionMismatchError):
        gibbs_mu(y, np.broadcast_to(np.eye(2), (4, 2, 2)).copy(), prior, np.random.default_rng(0))


def correlated_case(rng, trials=3, n_points=4, dim=3):
    y = rng.normal(size=(trials, n_points, dim))
    times = np.linspace(0.0, 1.0, n_points)
    prior = factorize_gram(np.exp(-0.5 * (times[:, None] - times[None, :]) ** 2 / 0.3**2), 1e-5)
    a = rng.normal(size=(n_points, dim, dim))
    covariances = a @ np.swapaxes(a, -1, -2) + np.eye(dim)
    return y, covariances, prior


def test_channel_scan_matches_the_joint_draw_for_independent_channels():
    y, _, prior = correlated_case(np.random.default_rng(3))
    covariances = np.broadcast_to(np.diag([0.5, 1.0, 2.0]), (4, 3, 3)).copy()
    joint = gibbs_mu(y, covariances, prior, ZeroNoise())
    scan = gibbs_mu_by_channel(y, covariances, prior, np.zeros((4, 3)), ZeroNoise())
    np.testing.assert_allclose(scan, joint, atol=1e-10)


def test_repeated_channel_scans_converge_to_the_joint_mean():
    y, covariances, prior = correlated_case(np.random.default_rng(4))
    joint = gibbs_mu(y, covariances, prior, ZeroNoise())
    mu = np.zeros((4, 3))
    for _ in range(500):
        mu = gibbs_mu_by_channel(y, covariances, prior, mu, ZeroNoise())
    np.testing.assert_allclose(mu, joint, atol=1e-6)


def test_joint_mean_is_a_fixed_point_of_the_channel_scan():
    y, covariances, prior = correlated_case(np.random.default_rng(5))
    joint = gibbs_mu(y, covariances, prior, ZeroNoise())
    np.testing.assert_allclose(gibbs_mu_by_channel(y, covariances, prior, joint, ZeroNoise()), joint, atol=1e-9)


def test_channel_scan_rejects_a_mismatched_mean():
    y, covariances, prior = correlated_case(np.random.default_rng(6))
    with pytest.raises(DimensionMismatchError):
        gibbs_mu_by_channel(y, covariances, prior, np.zeros((4, 2)), np.random.default_rng(0))
