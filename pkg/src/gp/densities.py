"""Vector GP and unit-vector GP log-densities plus hyperprior densities.

Additive constants (2 pi terms, normalizers of the unit-norm conditioning)
are dropped throughout.
"""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.geometry.sphere import NORM_TOL
from src.gp.kernel import GramFactor
from src.priors.directional import pole
from src.utils.errors import (
    DimensionMismatchError,
    InvalidConfigError,
    NonPositiveGammaError,
    NotPositiveDefiniteError,
    RowNotUnitNormError,
)
from src.utils.types import FloatArray


@dataclass(frozen=True)
class HyperPrior:
    """gamma ~ InvGamma(a, b), log rho ~ N(m, V)."""

    a: float = 1.0
    b: float = 0.1
    m: float = 0.0
    v: float = 1.0

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0 and self.v > 0):
            raise InvalidConfigError("Hyperprior needs a, b, V > 0", {"a": self.a, "b": self.b, "V": self.v})


def as_factor(k: FloatArray | GramFactor) -> GramFactor:
    if isinstance(k, GramFactor):
        return k
    k = np.asarray(k, dtype=np.float64)
    try:
        lower = linalg.cholesky(k, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Gram matrix is not positive definite: {e}") from e
    return GramFactor(k, lower, 2.0 * float(np.sum(np.log(np.diag(lower)))), 0.0)


def vgp_logpdf(z: FloatArray, k: FloatArray | GramFactor) -> float:
    """Matrix normal MN(0, K, I_D) log-density of an N x D realization."""
    factor = as_factor(k)
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    if z.shape[0] != factor.n:
        raise DimensionMismatchError("Realization and Gram matrix differ in N", {"z": z.shape[0], "k": factor.n})
    dim = z.shape[1]
    return -0.5 * dim * factor.logdet - 0.5 * factor.quad_trace(z)


def _unit_rows(rows: FloatArray, factor: GramFactor) -> FloatArray:
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[0] != factor.n:
        raise DimensionMismatchError("Rows and Gram matrix differ in N", {"rows": rows.shape[0], "k": factor.n})
    deviation = float(np.max(np.abs(np.linalg.norm(rows, axis=1) - 1.0)))
    if deviation > NORM_TOL:
        raise RowNotUnitNormError("Unit-vector GP rows must have unit norm", {"deviation": deviation})
    return rows


def uvgp_logpdf(rows: FloatArray, k: FloatArray | GramFactor, mean: FloatArray | None = None) -> float:
    """-1/2 tr((L - M)^T K^-1 (L - M)) for N unit rows around the constant mean row."""
    factor = as_factor(k)
    rows = _unit_rows(rows, factor)
    centre = pole(rows.shape[1]) if mean is None else np.asarray(mean, dtype=np.float64)
    return -0.5 * factor.quad_trace(rows - centre)


def uvgp_grad(rows: FloatArray, k: FloatArray | GramFactor, mean: FloatArray | None = None) -> FloatArray:
    factor = as_factor(k)
    rows = _unit_rows(rows, factor)
    centre = pole(rows.shape[1]) if mean is None else np.asarray(mean, dtype=np.float64)
    return -factor.solve(rows - centre)


def hyper_logpdfs(gamma: float, eta: float, hp: HyperPrior) -> tuple[float, float]:
    """Inverse-gamma log-density of gamma and normal log-density of eta = log rho."""
    if not gamma > 0:
        raise NonPositiveGammaError("Kernel scale must be positive", {"gamma": gamma})
    log_gamma = -(hp.a + 1.0) * float(np.log(gamma)) - hp.b / gamma
    log_eta = -((eta - hp.m) ** 2) / (2.0 * hp.v)
    return log_gamma, log_eta
