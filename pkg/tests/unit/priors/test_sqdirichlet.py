import numpy as np
import pytest
from scipy import stats

from src.geometry.sphere import SpherePoint
from src.priors.sqdirichlet import (
    SqDirichletParams,
    jointly_uniform_alpha,
    marginally_uniform_alpha,
    marginally_uniform_pole_alpha,
    sqdir_grad,
    sqdir_logpdf,
    sqdir_sample,
)
from src.utils.errors import DivByZeroError, LogOfZeroError, NonPositiveAlphaError

HALF = np.sqrt(0.5)


def test_half_concentrations_are_uniform():
    p = SqDirichletParams(np.full(3, 0.5))
    point = np.array([0.2, -0.3, np.sqrt(1 - 0.13)])
    assert sqdir_logpdf(point, p) == 0.0
    np.testing.assert_allclose(sqdir_grad(point, p), 0.0)


def test_logpdf_and_grad_direct_formula():
    p = SqDirichletParams(np.array([1.0, 1.0]))
    point = SpherePoint(np.array([HALF, HALF]))
    assert sqdir_logpdf(point, p) == pytest.approx(np.log(0.5))
    np.testing.assert_allclose(sqdir_grad(point, p), [np.sqrt(2), np.sqrt(2)])


def test_gradient_matches_finite_differences(chart_check, random_point):
    p = SqDirichletParams(np.array([0.3, 2.0, 1.5, 4.0]))
    for seed in range(5):
        point = random_point(4, seed)
        numeric, analytic = chart_check(lambda x: sqdir_logpdf(x, p), lambda x: sqdir_grad(x, p), point)
        np.testing.assert_allclose(analytic, numeric, rtol=1e-5, atol=1e-8)


def test_zero_coordinates_raise():
    p = SqDirichletParams(np.array([1.0, 1.0]))
    with pytest.raises(LogOfZeroError):
        sqdir_logpdf(np.array([0.0, 1.0]), p)
    with pytest.raises(DivByZeroError):
        sqdir_grad(np.array([0.0, 1.0]), p)


def test_nonpositive_concentration_rejected():
    with pytest.raises(NonPositiveAlphaError):
        SqDirichletParams(np.array([1.0, 0.0]))


def test_samples_are_unit_and_concentrate_on_heavy_coordinate():
    rng = np.random.default_rng(0)
    p = SqDirichletParams(np.array([0.1, 0.1, 10.0]))
    draws = np.array([sqdir_sample(p, rng).coords for _ in range(2000)])
    np.testing.assert_allclose(np.linalg.norm(draws, axis=1), 1.0, atol=1e-12)
    assert np.mean(np.abs(draws[:, 2]) > 0.9) > 0.95


def test_uniform_samples_fill_octants_evenly():
    rng = np.random.default_rng(1)
    p = SqDirichletParams(np.full(3, 0.5))
    draws = np.array([sqdir_sample(p, rng).coords for _ in range(8000)])
    octant = (draws > 0).astype(int) @ np.array([1, 2, 4])
    counts = np.bincount(octant, minlength=8)
    assert stats.chisquare(counts).pvalue > 0.01


def test_jointly_uniform_alpha():
    params = jointly_uniform_alpha(3)
    np.testing.assert_allclose(params[0].alpha, [0.5, 1.5])
    np.testing.assert_allclose(params[1].alpha, [0.5, 0.5, 1.0])
    np.testing.assert_allclose(jointly_uniform_alpha(2)[0].alpha, [0.5, 1.0])


def test_jointly_uniform_prior_gives_beta_marginal():
    rng = np.random.default_rng(2)
    row2 = jointly_uniform_alpha(3)[0]
    rho = np.array([sqdir_sample(row2, rng).coords[0] for _ in range(5000)])
    # rho_12 = l_21, which is Beta(3/2, 3/2) on (-1, 1) when D = 3
    result = stats.kstest((rho + 1) / 2, stats.beta(1.5, 1.5).cdf)
    assert result.pvalue > 0.01


def test_marginally_uniform_pole_formula():
    assert marginally_uniform_pole_alpha(3, 2) == -0.5
    assert marginally_uniform_pole_alpha(3, 3) == 1.0
    assert marginally_uniform_pole_alpha(5, 4) == 4.5


def test_marginally_uniform_alpha_raises_at_second_row():
    with pytest.raises(NonPositiveAlphaError):
        marginally_uniform_alpha(3)
