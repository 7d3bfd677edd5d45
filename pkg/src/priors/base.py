"""Shared protocol for priors on a single sphere."""

from typing import Protocol

import numpy as np

from src.geometry.sphere import SpherePoint
from src.utils.types import FloatArray


class SpherePrior(Protocol):
    """Unnormalized log-density on S^{d-1} evaluated on stacked rows.

    Both methods accept an (n, d) array and never raise on boundary points:
    they return non-finite values, which samplers treat as rejections.
    """

    def log_terms(self, x: FloatArray) -> FloatArray:
        """Per-row log-density, shape (n,)."""
        ...

    def grad(self, x: FloatArray) -> FloatArray:
        """Per-row ambient gradient, shape (n, d)."""
        ...


class UniformPrior:
    """The constant density on the sphere."""

    def log_terms(self, x: FloatArray) -> FloatArray:
        return np.zeros(x.shape[0])

    def grad(self, x: FloatArray) -> FloatArray:
        return np.zeros_like(x)


def as_rows(point: SpherePoint | FloatArray) -> FloatArray:
    coords = point.coords if isinstance(point, SpherePoint) else np.asarray(point, dtype=np.float64)
    return np.atleast_2d(coords)
