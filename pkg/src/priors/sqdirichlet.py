"""Squared-Dirichlet distribution on the unit sphere.

A sphere point l has l^2 ~ Dirichlet(alpha); with respect to surface measure
its density is proportional to prod_k |l_k|^(2 alpha_k - 1).
"""

from dataclasses import dataclass

import numpy as np

from src.geometry.sphere import SpherePoint
from src.priors.base import as_rows
from src.utils.errors import DimensionMismatchError, DivByZeroError, LogOfZeroError, NonPositiveAlphaError
from src.utils.types import FloatArray


@dataclass(frozen=True)
class SqDirichletParams:
    alpha: FloatArray

    def __post_init__(self) -> None:
        alpha = np.array(self.alpha, dtype=np.float64, copy=True).ravel()
        if alpha.size < 1 or np.any(alpha <= 0) or not np.all(np.isfinite(alpha)):
            raise NonPositiveAlphaError("Concentrations must be positive", {"alpha": str(alpha.tolist())})
        alpha.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)

    @property
    def dim(self) -> int:
        return int(self.alpha.size)

    @property
    def exponents(self) -> FloatArray:
        return 2.0 * self.alpha - 1.0

    def log_terms(self, x: FloatArray) -> FloatArray:
        exponents = self.exponents
        with np.errstate(divide="ignore", invalid="ignore"):
            logs = np.where(exponents != 0, np.log(np.abs(x)), 0.0)
        return np.asarray(logs @ exponents)

    def grad(self, x: FloatArray) -> FloatArray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.asarray(self.exponents / x)


def _check_dim(rows: FloatArray, p: SqDirichletParams) -> None:
    if rows.shape[-1] != p.dim:
        raise DimensionMismatchError("Point and concentrations differ in dimension", {"point": rows.shape[-1], "alpha": p.dim})


def sqdir_logpdf(l: SpherePoint | FloatArray, p: SqDirichletParams) -> float:
    rows = as_rows(l)
    _check_dim(rows, p)
    if np.any((rows == 0) & (p.exponents != 0)):
        raise LogOfZeroError("Zero coordinate where the density exponent is nonzero")
    return float(p.log_terms(rows)[0])


def sqdir_grad(l: SpherePoint | FloatArray, p: SqDirichletParams) -> FloatArray:
    rows = as_rows(l)
    _check_dim(rows, p)
    if np.any(rows == 0):
        raise DivByZeroError("Gradient undefined at a zero coordinate")
    return np.asarray(p.grad(rows)[0])


def sqdir_sample(p: SqDirichletParams, rng: np.random.Generator) -> SpherePoint:
    squares = rng.dirichlet(p.alpha)
    signs = rng.choice(np.array([-1.0, 1.0]), size=p.dim)
    coords = signs * np.sqrt(squares)
    # sqrt of a simplex point is unit norm only up to rounding
    return SpherePoint(coords / np.linalg.norm(coords))


def jointly_uniform_alpha(dim: int) -> list[SqDirichletParams]:
    """Row concentrations for i = 2..D that make P uniform over correlation matrices."""
    if dim < 2:
        raise DimensionMismatchError("Need D >= 2", {"dim": dim})
    return [SqDirichletParams(np.append(np.full(i - 1, 0.5), (dim - i) / 2 + 1)) for i in range(2, dim + 1)]


def marginally_uniform_pole_alpha(dim: int, row: int) -> float:
    """Pole concentration ((i - 2) D - 1) / 2 of the marginally uniform construction."""
    return ((row - 2) * dim - 1) / 2


def marginally_uniform_alpha(dim: int) -> list[SqDirichletParams]:
    """Row concentrations giving uniform marginals for every correlation.

    The pole concentration formula is nonpositive at i = 2 for every D, so
    this always raises; the formula itself is exposed through
    `marginally_uniform_pole_alpha`.
    """
    if dim < 2:
        raise DimensionMismatchError("Need D >= 2", {"dim": dim})
    params = []
    for i in range(2, dim + 1):
        pole = marginally_uniform_pole_alpha(dim, i)
        if pole <= 0:
            raise NonPositiveAlphaError("Pole concentration is not positive", {"dim": dim, "row": i, "alpha": pole})
        params.append(SqDirichletParams(np.append(np.full(i - 1, 0.5), pole)))
    return params
