"""Elliptical slice sampling for Gaussian-prior blocks and univariate slice sampling."""

import logging
from collections.abc import Callable

import numpy as np

from src.gp.kernel import GramFactor
from src.utils.errors import InvalidConfigError, MaxStepoutExceededError
from src.utils.types import FloatArray

logger = logging.getLogger(__name__)

MIN_BRACKET = 1e-14


def _log_uniform(rng: np.random.Generator) -> float:
    # 1 - U lies in (0, 1], so the log is finite
    return float(np.log1p(-rng.random()))


def ess_step(
    current: FloatArray,
    prior: GramFactor,
    loglik: Callable[[FloatArray], float],
    rng: np.random.Generator,
    current_loglik: float | None = None,
) -> tuple[FloatArray, float]:
    """One elliptical slice move for an N x D block with prior MN(0, K, I).

    Returns the new state and its log-likelihood.
    """
    current = np.asarray(current, dtype=np.float64)
    if current.shape[0] != prior.n:
        raise InvalidConfigError("State and prior differ in N", {"state": current.shape[0], "prior": prior.n})
    l0 = loglik(current) if current_loglik is None else current_loglik
    nu = prior.colour(rng.standard_normal(current.shape))
    threshold = l0 + _log_uniform(rng)

    theta = rng.uniform(0.0, 2.0 * np.pi)
    theta_min, theta_max = theta - 2.0 * np.pi, theta
    while True:
        proposal = current * np.cos(theta) + nu * np.sin(theta)
        value = loglik(proposal)
        if value >= threshold:
            return proposal, value
        if theta < 0:
            theta_min = theta
        else:
            theta_max = theta
        if theta_max - theta_min < MIN_BRACKET:
            logger.debug("Elliptical slice bracket collapsed; keeping the current state")
            return current, l0
        theta = rng.uniform(theta_min, theta_max)


def slice_step_1d(
    current: float,
    logpost: Callable[[float], float],
    rng: np.random.Generator,
    width: float = 1.0,
    max_stepout: int = 50,
) -> float:
    """Stepping-out and shrinkage slice update of a scalar."""
    f0 = logpost(current)
    if not np.isfinite(f0):
        raise InvalidConfigError("Log-posterior must be finite at the current point", {"current": current})
    threshold = f0 + _log_uniform(rng)

    left = current - width * rng.random()
    right = left + width
    left_budget = int(np.floor(max_stepout * rng.random()))
    right_budget = max_stepout - 1 - left_budget
    while left_budget > 0 and logpost(left) > threshold:
        left -= width
        left_budget -= 1
    while right_budget > 0 and logpost(right) > threshold:
        right += width
        right_budget -= 1
    if left_budget == 0 and right_budget == 0 and logpost(left) > threshold and logpost(right) > threshold:
        raise MaxStepoutExceededError(
            "Slice still open on both sides after stepping out", {"current": current, "max_stepout": max_stepout}
        )

    while True:
        proposal = left + rng.random() * (right - left)
        if logpost(proposal) > threshold:
            return float(proposal)
        if proposal < current:
            left = proposal
        else:
            right = proposal
        if right - left < MIN_BRACKET:
            return float(current)
