"""Correlation/covariance Cholesky factors whose rows live on spheres.

Half-vectorization is row-major over the lower triangle everywhere in the
package. The exchange matrix is never built; reversal is index slicing.
"""

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.geometry.sphere import NORM_TOL
from src.utils.errors import (
    DimensionMismatchError,
    NotPositiveDefiniteError,
    NotUnitDiagonalError,
    RowNotUnitNormError,
    ZeroDiagonalError,
)
from src.utils.types import FloatArray

POLE_TOL = 1e-12
UNIT_DIAGONAL_TOL = 1e-8


@dataclass(frozen=True)
class CorrCholesky:
    """Lower-triangular L with unit-norm rows, so that L L^T is a correlation matrix."""

    matrix: FloatArray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=np.float64, copy=True)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionMismatchError("Cholesky factor must be square", {"shape": str(matrix.shape)})
        if np.any(np.triu(matrix, 1)):
            raise DimensionMismatchError("Cholesky factor must be lower triangular")
        deviation = float(np.max(np.abs(np.linalg.norm(matrix, axis=1) - 1.0)))
        if deviation > NORM_TOL:
            raise RowNotUnitNormError("Cholesky rows must have unit norm", {"deviation": deviation})
        if np.any(np.abs(np.diag(matrix)) <= POLE_TOL):
            raise ZeroDiagonalError("Cholesky diagonal must stay off the equator")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def rows(self) -> list[FloatArray]:
        return [self.matrix[i, : i + 1].copy() for i in range(self.dim)]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float] | FloatArray]) -> "CorrCholesky":
        dim = len(rows)
        matrix = np.zeros((dim, dim))
        for i, row in enumerate(rows):
            row = np.asarray(row, dtype=np.float64)
            if row.shape != (i + 1,):
                raise DimensionMismatchError("Row i must have i entries", {"row": i + 1, "length": row.size})
            matrix[i, : i + 1] = row
        return cls(matrix)

    @classmethod
    def identity(cls, dim: int) -> "CorrCholesky":
        return cls(np.eye(dim))


@dataclass(frozen=True)
class CovCholesky:
    """Separation Sigma = diag(sigma) P diag(sigma) with P from a CorrCholesky."""

    scale: FloatArray
    factor: CorrCholesky

    def __post_init__(self) -> None:
        scale = np.array(self.scale, dtype=np.float64, copy=True)
        if scale.shape != (self.factor.dim,):
            raise DimensionMismatchError("Scale and factor differ in dimension")
        if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
            raise NotPositiveDefiniteError("Standard deviations must be positive and finite")
        scale.setflags(write=False)
        object.__setattr__(self, "scale", scale)

    @property
    def dim(self) -> int:
        return self.factor.dim

    def covariance(self) -> FloatArray:
        sigma_l = self.scale[:, None] * self.factor.matrix
        return sigma_l @ sigma_l.T


def rows_to_corr(factor: CorrCholesky) -> FloatArray:
    corr = factor.matrix @ factor.matrix.T
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return corr


def corr_to_rows(corr: FloatArray) -> CorrCholesky:
    corr = np.asarray(corr, dtype=np.float64)
    if np.any(np.abs(np.diag(corr) - 1.0) > UNIT_DIAGONAL_TOL):
        raise NotUnitDiagonalError("Correlation matrix needs a unit diagonal")
    try:
        lower = linalg.cholesky(corr, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Correlation matrix is not positive definite: {e}") from e
    # rounding in the factorization can leave rows 1e-16 off the sphere
    lower /= np.linalg.norm(lower, axis=1, keepdims=True)
    return CorrCholesky(lower)


def reversed_cholesky(cov: FloatArray) -> FloatArray:
    """Upper-triangular U with cov = U U^T, via the Cholesky factor of the reversed matrix."""
    cov = np.asarray(cov, dtype=np.float64)
    try:
        lower = linalg.cholesky(cov[::-1, ::-1], lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Covariance is not positive definite: {e}") from e
    return np.ascontiguousarray(lower[::-1, ::-1])


def _log_abs_diagonal(factor: FloatArray) -> FloatArray:
    diagonal = np.abs(np.diag(factor))
    if np.any(diagonal == 0):
        raise ZeroDiagonalError("Triangular factor has a zero diagonal entry")
    return np.log(diagonal)


def logdet_jacobian_sigma_to_u(upper: FloatArray) -> float:
    """log|d vech(Sigma) / d vech(U^T)| for Sigma = U U^T with U upper triangular."""
    log_diag = _log_abs_diagonal(upper)
    dim = log_diag.size
    return float(dim * np.log(2.0) + np.arange(1, dim + 1) @ log_diag)


def logdet_jacobian_l_to_p(lower: FloatArray) -> float:
    log_diag = _log_abs_diagonal(lower)
    dim = log_diag.size
    return float(-dim * np.log(2.0) + (np.arange(1, dim + 1) - (dim + 1)) @ log_diag)


def vech(matrix: FloatArray) -> FloatArray:
    rows, cols = np.tril_indices(matrix.shape[-1])
    return np.asarray(matrix[..., rows, cols])
