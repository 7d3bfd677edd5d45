"""Standard HMC on unconstrained vectors."""

import logging
from typing import NamedTuple

import numpy as np

from src.utils.errors import NonFiniteGradientError
from src.utils.types import EuclideanLogDensityAndGrad, FloatArray

logger = logging.getLogger(__name__)


class HmcTransition(NamedTuple):
    q: FloatArray
    accepted: bool
    accept_prob: float


def _evaluate(target: EuclideanLogDensityAndGrad, q: FloatArray) -> tuple[float, FloatArray]:
    log_f, grad = target(q)
    if not np.isfinite(log_f) or not np.all(np.isfinite(grad)):
        raise NonFiniteGradientError("Target returned a non-finite value or gradient")
    return float(log_f), np.asarray(grad, dtype=np.float64)


def leapfrog_euclidean(
    q: FloatArray, p: FloatArray, h: float, steps: int, target: EuclideanLogDensityAndGrad
) -> tuple[FloatArray, FloatArray, float]:
    """Run `steps` leapfrog steps; returns (q, p, log f(q))."""
    log_f, grad = _evaluate(target, q)
    p = p + 0.5 * h * grad
    for step in range(steps):
        q = q + h * p
        log_f, grad = _evaluate(target, q)
        if step < steps - 1:
            p = p + h * grad
    p = p + 0.5 * h * grad
    return q, p, log_f


def hmc_step_euclidean(
    q: FloatArray, target: EuclideanLogDensityAndGrad, h: float, steps: int, rng: np.random.Generator
) -> HmcTransition:
    q = np.asarray(q, dtype=np.float64)
    p0 = rng.standard_normal(q.shape)
    log_f0, _ = _evaluate(target, q)
    try:
        q_new, p_new, log_f_new = leapfrog_euclidean(q, p0, h, steps, target)
    except NonFiniteGradientError as e:
        logger.warning(f"Rejecting HMC trajectory: {e}")
        rng.random()
        return HmcTransition(q, False, 0.0)

    delta = (-log_f_new + 0.5 * float(p_new @ p_new)) - (-log_f0 + 0.5 * float(p0 @ p0))
    accept_prob = 0.0 if np.isnan(delta) else float(np.exp(min(0.0, -delta)))
    if rng.random() < accept_prob:
        return HmcTransition(q_new, True, accept_prob)
    return HmcTransition(q, False, accept_prob)
