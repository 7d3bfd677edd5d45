import numpy as np
import pytest

from src.geometry.cholesky import (
    CorrCholesky,
    CovCholesky,
    corr_to_rows,
    logdet_jacobian_l_to_p,
    logdet_jacobian_sigma_to_u,
    reversed_cholesky,
    rows_to_corr,
    vech,
)
from src.utils.errors import (
    NotPositiveDefiniteError,
    NotUnitDiagonalError,
    RowNotUnitNormError,
    ZeroDiagonalError,
)


def _random_corr(dim, rng):
    a = rng.normal(size=(dim, dim + 2))
    cov = a @ a.T
    sd = np.sqrt(np.diag(cov))
    return cov / np.outer(sd, sd)


def test_identity_rows_give_identity_correlation():
    np.testing.assert_allclose(rows_to_corr(CorrCholesky.identity(4)), np.eye(4))


def test_rows_to_corr_is_the_inner_product_of_rows():
    factor = CorrCholesky.from_rows([[1.0], [np.sqrt(0.5), np.sqrt(0.5)]])
    assert rows_to_corr(factor)[1, 0] == pytest.approx(0.70711, abs=1e-5)


def test_random_factor_gives_positive_definite_correlation():
    rng = np.random.default_rng(2)
    lower = np.tril(rng.normal(size=(5, 5)))
    lower /= np.linalg.norm(lower, axis=1, keepdims=True)
    corr = rows_to_corr(CorrCholesky(lower))
    np.testing.assert_allclose(np.diag(corr), 1.0)
    assert np.linalg.eigvalsh(corr).min() > 0


def test_corr_to_rows_two_by_two():
    factor = corr_to_rows(np.array([[1.0, 0.5], [0.5, 1.0]]))
    np.testing.assert_allclose(factor.rows[1], [0.5, np.sqrt(0.75)])


def test_corr_round_trip():
    corr = _random_corr(6, np.random.default_rng(3))
    assert np.max(np.abs(rows_to_corr(corr_to_rows(corr)) - corr)) < 1e-10


def test_flipping_a_column_sign_keeps_the_correlation():
    factor = corr_to_rows(_random_corr(4, np.random.default_rng(4)))
    for column in range(4):
        flipped = factor.matrix.copy()
        flipped[:, column] *= -1
        np.testing.assert_allclose(rows_to_corr(CorrCholesky(flipped)), rows_to_corr(factor), atol=1e-14)


def test_corr_to_rows_rejects_bad_input():
    with pytest.raises(NotUnitDiagonalError):
        corr_to_rows(np.diag([1.0, 2.0]))
    with pytest.raises(NotPositiveDefiniteError):
        corr_to_rows(np.array([[1.0, 1.2], [1.2, 1.0]]))


def test_corr_cholesky_validates_rows():
    with pytest.raises(RowNotUnitNormError):
        CorrCholesky(np.array([[1.0, 0.0], [0.5, 0.5]]))
    with pytest.raises(ZeroDiagonalError):
        CorrCholesky(np.array([[1.0, 0.0], [1.0, 0.0]]))


def test_cov_cholesky_separation():
    factor = corr_to_rows(np.array([[1.0, 0.3], [0.3, 1.0]]))
    cov = CovCholesky(np.array([2.0, 0.5]), factor).covariance()
    np.testing.assert_allclose(cov, [[4.0, 0.3], [0.3, 0.25]])
    with pytest.raises(NotPositiveDefiniteError):
        CovCholesky(np.array([1.0, -1.0]), factor)


def test_reversed_cholesky_simple_cases():
    np.testing.assert_allclose(reversed_cholesky(np.eye(3)), np.eye(3))
    np.testing.assert_allclose(reversed_cholesky(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))


def test_reversed_cholesky_reconstructs():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(4, 6))
    cov = a @ a.T
    upper = reversed_cholesky(cov)
    np.testing.assert_allclose(upper @ upper.T, cov, atol=1e-10)
    assert not np.any(np.tril(upper, -1))


def test_jacobians_at_identity():
    assert logdet_jacobian_sigma_to_u(np.eye(3)) == pytest.approx(3 * np.log(2))
    assert logdet_jacobian_l_to_p(np.eye(3)) == pytest.approx(-3 * np.log(2))


def test_sigma_to_u_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    upper = np.triu(rng.normal(size=(3, 3))) + 2 * np.eye(3)
    rows, cols = np.tril_indices(3)

    def forward(free):
        ut = np.zeros((3, 3))
        ut[rows, cols] = free
        u = ut.T
        return vech(u @ u.T)

    x0 = upper.T[rows, cols]
    step = 1e-6
    jac = np.empty((6, 6))
    for k in range(6):
        e = np.zeros(6)
        e[k] = step
        jac[:, k] = (forward(x0 + e) - forward(x0 - e)) / (2 * step)
    expected = np.linalg.slogdet(jac)[1]
    assert logdet_jacobian_sigma_to_u(upper) == pytest.approx(expected, rel=1e-4)
