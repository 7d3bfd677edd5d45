"""Exponential kernel Gram matrices over a time grid.

K(t, t') = gamma * exp(-0.5 |t - t'|^s / rho^s) + nugget * [t = t'].
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from src.utils.errors import InvalidConfigError, NonPositiveGammaError, NotPositiveDefiniteError
from src.utils.types import FloatArray

logger = logging.getLogger(__name__)

MAX_NUGGET = 1e-1
FIRST_ESCALATED_NUGGET = 1e-10


@dataclass(frozen=True)
class KernelParams:
    gamma: float
    rho: float
    s: float = 2.0
    nugget: float = 1e-5

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise NonPositiveGammaError("Kernel scale must be positive", {"gamma": self.gamma})
        if not self.rho > 0:
            raise InvalidConfigError("Length-scale must be positive", {"rho": self.rho})
        if not 0 < self.s <= 2:
            raise InvalidConfigError("Smoothness exponent must lie in (0, 2]", {"s": self.s})
        if self.nugget < 0:
            raise InvalidConfigError("Nugget must be non-negative", {"nugget": self.nugget})

    @property
    def eta(self) -> float:
        return float(np.log(self.rho))

    @classmethod
    def from_log_scale(cls, gamma: float, eta: float, s: float = 2.0, nugget: float = 1e-5) -> "KernelParams":
        return cls(gamma, float(np.exp(eta)), s, nugget)


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing time points inside (0, 1]."""

    points: FloatArray

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64, copy=True).ravel()
        if points.size < 2:
            raise InvalidConfigError("A time grid needs at least two points", {"n": points.size})
        if np.any(np.diff(points) <= 0):
            raise InvalidConfigError("Time points must be strictly increasing")
        if points[0] <= 0 or points[-1] > 1:
            raise InvalidConfigError("Time points must lie in (0, 1]", {"first": points[0], "last": points[-1]})
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return int(self.points.size)

    @classmethod
    def rescaled(cls, times: FloatArray) -> "TimeGrid":
        """Affinely map raw times into (0, 1]; evenly spaced input becomes n / N."""
        times = np.asarray(times, dtype=np.float64).ravel()
        if times.size < 2:
            raise InvalidConfigError("A time grid needs at least two points", {"n": times.size})
        span = times[-1] - times[0]
        if span <= 0:
            raise InvalidConfigError("Time points must be strictly increasing")
        offset = span / (times.size - 1)
        scaled = (times - times[0] + offset) / (span + offset)
        scaled[-1] = 1.0
        return cls(scaled)


def correlation_kernel(grid: TimeGrid, rho: float, s: float = 2.0) -> FloatArray:
    """exp(-0.5 |t_i - t_j|^s / rho^s) without scale or nugget."""
    distance = np.abs(grid.points[:, None] - grid.points[None, :])
    return np.exp(-0.5 * (distance / rho) ** s)


@dataclass(frozen=True)
class GramFactor:
    """A Gram matrix with its lower Cholesky factor and log-determinant."""

    matrix: FloatArray
    lower: FloatArray
    logdet: float
    nugget: float

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def solve(self, rhs: FloatArray) -> FloatArray:
        return np.asarray(linalg.cho_solve((self.lower, True), rhs))

    def whiten(self, rhs: FloatArray) -> FloatArray:
        """L^-1 rhs."""
        return np.asarray(linalg.solve_triangular(self.lower, rhs, lower=True))

    def quad_trace(self, z: FloatArray) -> float:
        """tr(Z^T K^-1 Z)."""
        return float(np.sum(self.whiten(z) ** 2))

    def colour(self, xi: FloatArray) -> FloatArray:
        """L xi: maps standard normal draws to draws with covariance K."""
        return np.asarray(self.lower @ xi)

    def scaled(self, gamma: float) -> "GramFactor":
        if not gamma > 0:
            raise NonPositiveGammaError("Kernel scale must be positive", {"gamma": gamma})
        return GramFactor(
            gamma * self.matrix,
            np.sqrt(gamma) * self.lower,
            self.logdet + self.n * float(np.log(gamma)),
            gamma * self.nugget,
        )


def factorize_gram(base: FloatArray, nugget: float, max_nugget: float = MAX_NUGGET) -> GramFactor:
    """Cholesky of base + nugget I, multiplying the nugget by 10 until it succeeds."""
    identity = np.eye(base.shape[0])
    current = nugget
    while True:
        matrix = base + current * identity
        try:
            lower = linalg.cholesky(matrix, lower=True)
        except linalg.LinAlgError:
            lower = None
        if lower is not None:
            if current != nugget:
                logger.debug(f"Gram factorization needed nugget {current:g} (requested {nugget:g})")
            logdet = 2.0 * float(np.sum(np.log(np.diag(lower))))
            return GramFactor(matrix, lower, logdet, current)
        current = current * 10 if current > 0 else FIRST_ESCALATED_NUGGET
        if current > max_nugget:
            raise NotPositiveDefiniteError(
                "Gram matrix not factorizable after jitter escalation", {"nugget": nugget, "max_nugget": max_nugget}
            )


def build_gram(grid: TimeGrid, kp: KernelParams) -> FloatArray:
    base = kp.gamma * correlation_kernel(grid, kp.rho, kp.s)
    return factorize_gram(base, kp.nugget).matrix


class GramCache:
    """Chain-local cache of K0(eta) = C(eta) + nugget I; K = gamma K0(eta).

    The nugget is relative to gamma so that gamma moves are pure rescaling.
    """

    def __init__(self, grid: TimeGrid, s: float = 2.0, nugget: float = 1e-5) -> None:
        self.grid = grid
        self.s = s
        self.nugget = nugget
        self._entries: dict[float, GramFactor] = {}

    def base(self, eta: float) -> GramFactor:
        entry = self._entries.get(eta)
        if entry is None:
            entry = factorize_gram(correlation_kernel(self.grid, float(np.exp(eta)), self.s), self.nugget)
            self._entries[eta] = entry
        return entry

    def gram(self, gamma: float, eta: float) -> GramFactor:
        return self.base(eta).scaled(gamma)

    def invalidate(self, keep: tuple[float, ...] = ()) -> None:
        """Drop every entry except those for the given etas."""
        self._entries = {eta: factor for eta, factor in self._entries.items() if eta in keep}
