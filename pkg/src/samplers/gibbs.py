"""Conjugate Gibbs draws for GP scales and the mean process."""

import numpy as np
from scipy import linalg

from src.gp.densities import HyperPrior
from src.gp.kernel import GramFactor
from src.model.dto.experiment import GpBlock
from src.utils.errors import DimensionMismatchError, InvalidConfigError, NotPositiveDefiniteError
from src.utils.types import FloatArray


def gp_component_count(n_points: int, dim: int, which: GpBlock) -> int:
    """Free GP components: N D for mean/log-sd, N (D(D+1)/2 - 1) for the full Cholesky."""
    if which is GpBlock.CHOL:
        return n_points * (dim * (dim + 1) // 2 - 1)
    return n_points * dim


def _posterior_params(
    quad: float, n_points: int, dim: int, which: GpBlock, hp: HyperPrior, n_components: int | None
) -> tuple[float, float]:
    count = gp_component_count(n_points, dim, which) if n_components is None else n_components
    return hp.a + 0.5 * count, hp.b + 0.5 * quad


def gibbs_gamma(
    quad: float,
    n_points: int,
    dim: int,
    which: GpBlock,
    hp: HyperPrior,
    rng: np.random.Generator,
    n_components: int | None = None,
) -> float:
    """Draw gamma ~ InvGamma(a + components / 2, b + Q / 2).

    `n_components` overrides the full-factor count (banded Cholesky grids).
    """
    if quad < 0:
        raise InvalidConfigError("Quadratic form must be non-negative", {"quad": quad})
    shape, scale = _posterior_params(quad, n_points, dim, which, hp, n_components)
    return float(scale / rng.gamma(shape))


def _check_shapes(y: FloatArray, covariances: FloatArray, prior: GramFactor) -> tuple[int, int, int]:
    trials, n_points, dim = y.shape
    if covariances.shape != (n_points, dim, dim) or prior.n != n_points:
        raise DimensionMismatchError(
            "Covariances, prior and data disagree", {"data": str(y.shape), "cov": str(covariances.shape)}
        )
    return trials, n_points, dim


def _precisions(covariances: FloatArray) -> FloatArray:
    """Per-time inverses through batched Cholesky factors."""
    try:
        cov_lower = np.linalg.cholesky(covariances)
    except np.linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Per-time covariance is not positive definite: {e}") from e
    identity = np.broadcast_to(np.eye(covariances.shape[-1]), covariances.shape)
    cov_lower_inv = np.linalg.solve(cov_lower, identity)
    return np.asarray(np.swapaxes(cov_lower_inv, -1, -2) @ cov_lower_inv)


def _gaussian_draw(precision: FloatArray, rhs: FloatArray, rng: np.random.Generator) -> FloatArray:
    """Draw from N(Q^-1 b, Q^-1)."""
    try:
        lower = linalg.cholesky(precision, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Posterior precision is not positive definite: {e}") from e
    mean = linalg.cho_solve((lower, True), rhs)
    return np.asarray(mean + linalg.solve_triangular(lower.T, rng.standard_normal(mean.size), lower=False))


def gibbs_mu(
    y: FloatArray, covariances: FloatArray, prior: GramFactor, rng: np.random.Generator
) -> FloatArray:
    """Draw the N x D mean grid given trial data and per-time covariances.

    vec() stacks columns, so entry (n, k) sits at k * N + n. The block
    diagonal data precision is added straight into the (D, N, D, N) view of the
    Kronecker prior precision. Cost is O((D N)^3); banded models use
    `gibbs_mu_by_channel`.
    """
    y = np.asarray(y, dtype=np.float64)
    trials, n_points, dim = _check_shapes(y, covariances, prior)
    precisions = _precisions(covariances)

    prior_precision = prior.solve(np.eye(n_points))
    precision = np.kron(np.eye(dim), prior_precision)
    blocks = precision.reshape(dim, n_points, dim, n_points)
    times = np.arange(n_points)
    blocks[:, times, :, times] += trials * precisions

    rhs = np.einsum("nkj,nj->nk", precisions, y.sum(axis=0)).T.ravel()
    draw = _gaussian_draw(precision, rhs, rng)
    return np.asarray(draw.reshape(dim, n_points).T)


def gibbs_mu_by_channel(
    y: FloatArray, covariances: FloatArray, prior: GramFactor, mu: FloatArray, rng: np.random.Generator
) -> FloatArray:
    """One systematic scan over channels, each column of the mean grid drawn from its exact conditional.

    Leaves the same Gaussian conditional as `gibbs_mu` invariant at O(D N^3 + N D^3).
    The residual r_n = Lambda_n (ybar_n - mu_n) is updated in place after every channel.
    """
    y = np.asarray(y, dtype=np.float64)
    trials, n_points, dim = _check_shapes(y, covariances, prior)
    mu = np.array(mu, dtype=np.float64, copy=True)
    if mu.shape != (n_points, dim):
        raise DimensionMismatchError("Mean grid does not match the data", {"mu": str(mu.shape), "data": str(y.shape)})
    precisions = _precisions(covariances)
    prior_precision = prior.solve(np.eye(n_points))
    prior_precision = 0.5 * (prior_precision + prior_precision.T)

    residual = np.einsum("nkj,nj->nk", precisions, y.mean(axis=0) - mu)
    for k in range(dim):
        diagonal = trials * precisions[:, k, k]
        rhs = trials * residual[:, k] + diagonal * mu[:, k]
        draw = _gaussian_draw(prior_precision + np.diag(diagonal), rhs, rng)
        residual -= precisions[:, :, k] * (draw - mu[:, k])[:, None]
        mu[:, k] = draw
    return mu
