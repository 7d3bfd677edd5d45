"""Spherical HMC over a product of spheres.

The target is a log-density with respect to surface measure on each sphere,
so the potential is U(q) = -log f(q) and the kinetic energy is 1/2 |v|^2 with
v tangent. A position is a list of blocks, each an (n, d) array of rows on
S^{d-1}(r); the last coordinate of every row is its pole coordinate.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from src.geometry.sphere import project_rows, rotate_rows
from src.model.dto.experiment import StopRule
from src.utils.error_handling import RejectionCounter
from src.utils.errors import InvalidConfigError, NonFiniteGradientError
from src.utils.types import Blocks, FloatArray, LogDensityAndGrad

logger = logging.getLogger(__name__)

POLE_TOL = 1e-12


@dataclass(frozen=True)
class SphHmcConfig:
    h: float = 0.1
    t_max: int = 100
    stop_rule: StopRule = StopRule.TWO_ORTHANTS
    fixed_steps: int = 10
    radius: float = 1.0

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise InvalidConfigError("Step size must be positive", {"h": self.h})
        if self.t_max < 1 or self.fixed_steps < 1:
            raise InvalidConfigError("Trajectory lengths must be at least 1", {"t_max": self.t_max})

    @property
    def max_steps(self) -> int:
        return self.fixed_steps if self.stop_rule is StopRule.FIXED else self.t_max


@dataclass(frozen=True)
class TargetOnSphereProduct:
    """Log-density and its ambient gradient over a list of sphere blocks."""

    evaluate: LogDensityAndGrad

    def potential(self, q: Blocks) -> tuple[float, list[FloatArray]]:
        """(U, dU/dq) with U = -log f; non-finite values raise."""
        log_f, grad = self.evaluate(q)
        if len(grad) != len(q) or any(g.shape != b.shape for g, b in zip(grad, q)):
            raise NonFiniteGradientError("Gradient blocks do not match the position blocks")
        if not np.isfinite(log_f) or not all(np.all(np.isfinite(g)) for g in grad):
            raise NonFiniteGradientError("Target returned a non-finite value or gradient")
        return -float(log_f), [-g for g in grad]


class PhasePoint(NamedTuple):
    """Position, velocity, potential and potential gradient at one leapfrog step."""

    q: list[FloatArray]
    v: list[FloatArray]
    potential: float
    grad: list[FloatArray]
    norm_drift: float = 0.0

    @property
    def kinetic(self) -> float:
        return 0.5 * sum(float(np.sum(v * v)) for v in self.v)

    @property
    def energy(self) -> float:
        return self.potential + self.kinetic


class SphHmcTransition(NamedTuple):
    q: list[FloatArray]
    accepted: bool
    accept_prob: float
    steps: int
    norm_drift: float


def refresh_velocity(q: Blocks, rng: np.random.Generator, radius: float = 1.0) -> list[FloatArray]:
    """v ~ N(0, I) projected onto each tangent space, not renormalized."""
    return [project_rows(block, rng.standard_normal(block.shape), radius) for block in q]


def start_point(q: Blocks, v: Sequence[FloatArray], target: TargetOnSphereProduct) -> PhasePoint:
    potential, grad = target.potential(q)
    return PhasePoint([np.asarray(b) for b in q], [np.asarray(w) for w in v], potential, grad)


def sphhmc_leapfrog(
    point: PhasePoint, h: float, target: TargetOnSphereProduct, radius: float = 1.0
) -> PhasePoint:
    """Half kick, geodesic rotation, half kick."""
    q_new: list[FloatArray] = []
    v_new: list[FloatArray] = []
    drift = 0.0
    for q, v, g in zip(point.q, point.v, point.grad):
        v_half = v - 0.5 * h * project_rows(q, g, radius)
        q_rot, v_rot = rotate_rows(q, v_half, h, radius)
        norms = np.linalg.norm(q_rot, axis=-1, keepdims=True)
        drift = max(drift, float(np.max(np.abs(norms - radius))))
        q_new.append(q_rot * (radius / norms))
        v_new.append(v_rot)

    potential, grad = target.potential(q_new)
    v_new = [v - 0.5 * h * project_rows(q, g, radius) for q, v, g in zip(q_new, v_new, grad)]
    return PhasePoint(q_new, v_new, potential, grad, max(point.norm_drift, drift))


def _velocity_gradient(point: PhasePoint) -> float:
    return sum(float(np.sum(v * g)) for v, g in zip(point.v, point.grad))


def _projected_gradient_norm(point: PhasePoint, radius: float) -> float:
    return sum(float(np.sum(project_rows(q, g, radius) ** 2)) for q, g in zip(point.q, point.grad))


def sphhmc_accept_delta(trajectory: Sequence[PhasePoint], h: float, radius: float = 1.0) -> float:
    """Energy change of a trajectory written with potentials and gradients only."""
    first, last = trajectory[0], trajectory[-1]
    delta = last.potential - first.potential
    delta -= h**2 / 8.0 * (_projected_gradient_norm(last, radius) - _projected_gradient_norm(first, radius))
    delta -= h / 2.0 * (_velocity_gradient(first) + _velocity_gradient(last))
    delta -= h * sum(_velocity_gradient(point) for point in trajectory[1:-1])
    return delta


def accept_probability(delta: float) -> float:
    if np.isnan(delta):
        return 0.0
    return float(np.exp(min(0.0, -delta)))


def _inner(q0: Blocks | FloatArray, q_tau: Blocks | FloatArray) -> tuple[float, int]:
    if isinstance(q0, np.ndarray) and isinstance(q_tau, np.ndarray):
        rows = 1 if q0.ndim == 1 else q0.shape[0]
        return float(np.sum(q0 * q_tau)), rows
    inner = sum(float(np.sum(a * b)) for a, b in zip(q0, q_tau))
    rows = sum(1 if a.ndim == 1 else a.shape[0] for a in q0)
    return inner, rows


def stop_two_orthants(q0: Blocks | FloatArray, q_tau: Blocks | FloatArray) -> bool:
    """Stop once the trajectory has left the orthant of its start."""
    inner, _ = _inner(q0, q_tau)
    return inner < 0


def stop_probability(q0: Blocks | FloatArray, q_tau: Blocks | FloatArray, radius: float = 1.0) -> float:
    """Probability of continuing: (r^-2 <q0, q_tau> / rows + 1) / 2."""
    inner, rows = _inner(q0, q_tau)
    return float(np.clip((inner / (radius**2 * rows) + 1.0) / 2.0, 0.0, 1.0))


def stop_stochastic(
    q0: Blocks | FloatArray, q_tau: Blocks | FloatArray, rng: np.random.Generator, radius: float = 1.0
) -> bool:
    return bool(rng.random() >= stop_probability(q0, q_tau, radius))


def _off_equator(q: Blocks) -> bool:
    return all(bool(np.all(np.abs(block[:, -1]) > POLE_TOL)) for block in q)


def delta_sphhmc_step(
    q: Blocks,
    target: TargetOnSphereProduct,
    cfg: SphHmcConfig,
    rng: np.random.Generator,
    rejections: RejectionCounter | None = None,
) -> SphHmcTransition:
    """One joint proposal for every row of the product, accepted or rejected as a whole."""
    current = [np.asarray(block) for block in q]
    velocity = refresh_velocity(current, rng, cfg.radius)
    point = start_point(current, velocity, target)
    trajectory = [point]

    steps = 0
    try:
        for _ in range(cfg.max_steps):
            point = sphhmc_leapfrog(point, cfg.h, target, cfg.radius)
            trajectory.append(point)
            steps += 1
            if cfg.stop_rule is StopRule.TWO_ORTHANTS and stop_two_orthants(current, point.q):
                break
            if cfg.stop_rule is StopRule.STOCHASTIC and stop_stochastic(current, point.q, rng, cfg.radius):
                break
    except NonFiniteGradientError as e:
        logger.warning(f"Rejecting spherical HMC trajectory after {steps} steps: {e}")
        if rejections is not None:
            rejections.add("non-finite")
        rng.random()
        return SphHmcTransition(current, False, 0.0, steps, point.norm_drift)

    accept_prob = accept_probability(sphhmc_accept_delta(trajectory, cfg.h, cfg.radius))
    if not _off_equator(point.q):
        if rejections is not None:
            rejections.add("equator")
        accept_prob = 0.0

    accepted = bool(rng.random() < accept_prob)
    if accepted:
        return SphHmcTransition(point.q, True, accept_prob, steps, point.norm_drift)
    return SphHmcTransition(current, False, accept_prob, steps, point.norm_drift)
