"""von Mises-Fisher, Bingham and unit-vector Gaussian densities on spheres.

All densities are unnormalized; samplers only need ratios.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from src.geometry.sphere import NORM_TOL, SpherePoint
from src.priors.base import as_rows
from src.utils.errors import (
    DimensionMismatchError,
    InvalidConfigError,
    NotPositiveDefiniteError,
    RowNotUnitNormError,
)
from src.utils.types import FloatArray


def pole(dim: int) -> FloatArray:
    """n_d = (0, ..., 0, 1)."""
    n = np.zeros(dim)
    n[-1] = 1.0
    return n


@dataclass(frozen=True)
class VmfParams:
    kappa: float
    mu: FloatArray

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=np.float64, copy=True).ravel()
        if self.kappa < 0:
            raise InvalidConfigError("Concentration must be non-negative", {"kappa": self.kappa})
        if abs(float(np.linalg.norm(mu)) - 1.0) > NORM_TOL:
            raise RowNotUnitNormError("Mean direction must be a unit vector")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @classmethod
    def polar(cls, kappa: float, dim: int) -> "VmfParams":
        return cls(kappa, pole(dim))

    def log_terms(self, x: FloatArray) -> FloatArray:
        return np.asarray(self.kappa * (x @ self.mu))

    def grad(self, x: FloatArray) -> FloatArray:
        return np.broadcast_to(self.kappa * self.mu, x.shape).copy()


@dataclass(frozen=True)
class BinghamParams:
    """Polar Bingham: A = zeta * n_d n_d^T, so log p = zeta * l_d^2."""

    zeta: float

    def log_terms(self, x: FloatArray) -> FloatArray:
        return np.asarray(self.zeta * x[:, -1] ** 2)

    def grad(self, x: FloatArray) -> FloatArray:
        out = np.zeros_like(x)
        out[:, -1] = 2.0 * self.zeta * x[:, -1]
        return out


@dataclass(frozen=True)
class UnitVecGaussParams:
    mean: FloatArray
    cov: FloatArray
    _factor: tuple[FloatArray, bool] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=np.float64, copy=True).ravel()
        cov = np.array(self.cov, dtype=np.float64, copy=True)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError("Mean and covariance differ in dimension")
        try:
            factor = linalg.cho_factor(cov, lower=True)
        except linalg.LinAlgError as e:
            raise NotPositiveDefiniteError(f"Covariance is not positive definite: {e}") from e
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "_factor", factor)

    def _whitened_solve(self, x: FloatArray) -> FloatArray:
        return np.asarray(linalg.cho_solve(self._factor, (x - self.mean).T).T)

    def log_terms(self, x: FloatArray) -> FloatArray:
        return np.asarray(-0.5 * np.sum((x - self.mean) * self._whitened_solve(x), axis=1))

    def grad(self, x: FloatArray) -> FloatArray:
        return -self._whitened_solve(x)


def _rows(l: SpherePoint | FloatArray, dim: int) -> FloatArray:
    rows = as_rows(l)
    if rows.shape[-1] != dim:
        raise DimensionMismatchError("Point and parameters differ in dimension", {"point": rows.shape[-1], "params": dim})
    return rows


def vmf_logpdf(l: SpherePoint | FloatArray, p: VmfParams) -> float:
    return float(p.log_terms(_rows(l, p.mu.size))[0])


def vmf_grad(l: SpherePoint | FloatArray, p: VmfParams) -> FloatArray:
    return p.grad(_rows(l, p.mu.size))[0]


def bingham_logpdf(l: SpherePoint | FloatArray, p: BinghamParams) -> float:
    return float(p.log_terms(as_rows(l))[0])


def bingham_grad(l: SpherePoint | FloatArray, p: BinghamParams) -> FloatArray:
    return p.grad(as_rows(l))[0]


def uvgauss_logpdf(l: SpherePoint | FloatArray, p: UnitVecGaussParams) -> float:
    return float(p.log_terms(_rows(l, p.mean.size))[0])


def uvgauss_grad(l: SpherePoint | FloatArray, p: UnitVecGaussParams) -> FloatArray:
    return p.grad(_rows(l, p.mean.size))[0]
