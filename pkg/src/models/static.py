"""Static covariance model y_n ~ N(mu0, Sigma), Sigma = diag(sigma) P diag(sigma).

The correlation factor is sampled row by row on spheres. Under the
inverse-Wishart prior the factor is the reversed Cholesky U* of P (upper
triangular, P = U* U*^T); the sampler works on L~ = U*[::-1, ::-1], whose
rows keep their pole coordinate last. Every other prior acts on the lower
factor L directly, with a lognormal prior on the log standard deviations.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg

from src.geometry.cholesky import CorrCholesky, corr_to_rows, reversed_cholesky
from src.geometry.layout import RowLayout
from src.model.dto.experiment import PriorKind, TauJacobian
from src.models.schedule import ChainSchedule, DivergenceMonitor
from src.priors.base import SpherePrior
from src.priors.directional import BinghamParams, VmfParams
from src.priors.sqdirichlet import SqDirichletParams
from src.samplers.adaptation import da_init, dual_averaging_update
from src.samplers.hmc import hmc_step_euclidean
from src.samplers.sphhmc import TargetOnSphereProduct, delta_sphhmc_step
from src.utils.error_handling import RejectionCounter, error_context
from src.utils.errors import (
    DimensionMismatchError,
    InvalidConfigError,
    NonFiniteGradientError,
    NotPositiveDefiniteError,
    ZeroDiagonalError,
)
from src.utils.types import Blocks, FloatArray

logger = logging.getLogger(__name__)


def row_priors_for(
    kind: PriorKind, dim: int, alpha: Sequence[float], kappa: float, zeta: float
) -> tuple[SpherePrior, ...]:
    """Priors for rows 2..D of L, each centred on its pole; empty for the inverse-Wishart prior."""
    if kind is PriorKind.IW:
        return ()
    priors: list[SpherePrior] = []
    for row in range(2, dim + 1):
        if kind is PriorKind.SQDIR:
            priors.append(SqDirichletParams(np.append(np.full(row - 1, alpha[0]), alpha[1])))
        elif kind is PriorKind.VMF:
            priors.append(VmfParams.polar(kappa, row))
        else:
            priors.append(BinghamParams(zeta))
    return tuple(priors)


@dataclass(frozen=True, eq=False)
class StaticNiwModel:
    data: FloatArray
    psi: FloatArray
    nu: float
    mu0: FloatArray
    prior_kind: PriorKind = PriorKind.IW
    row_priors: tuple[SpherePrior, ...] = field(default_factory=tuple)
    tau_prior_sd: float = 0.1
    tau_jacobian: TauJacobian = TauJacobian.POLAR

    def __post_init__(self) -> None:
        data = np.atleast_2d(np.asarray(self.data, dtype=np.float64))
        psi = np.atleast_2d(np.asarray(self.psi, dtype=np.float64))
        mu0 = np.asarray(self.mu0, dtype=np.float64).ravel()
        dim = psi.shape[0]
        if psi.shape != (dim, dim) or mu0.size != dim or (data.size and data.shape[1] != dim):
            raise DimensionMismatchError(
                "Psi, mu0 and data disagree in dimension",
                {"psi": str(psi.shape), "mu0": mu0.size, "data": str(data.shape)},
            )
        try:
            linalg.cholesky(psi, lower=True)
        except linalg.LinAlgError as e:
            raise NotPositiveDefiniteError(f"Psi is not positive definite: {e}") from e
        if self.nu < dim:
            raise InvalidConfigError("Degrees of freedom must be at least D", {"nu": self.nu, "dim": dim})
        if self.prior_kind is not PriorKind.IW and len(self.row_priors) != dim - 1:
            raise InvalidConfigError("One prior per row 2..D is required", {"priors": len(self.row_priors)})
        if not self.tau_prior_sd > 0:
            raise InvalidConfigError("Log-sd prior scale must be positive", {"tau_prior_sd": self.tau_prior_sd})
        object.__setattr__(self, "data", data.reshape(-1, dim))
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "mu0", mu0)

    @property
    def dim(self) -> int:
        return int(self.psi.shape[0])

    @property
    def n_obs(self) -> int:
        return int(self.data.shape[0])

    @property
    def is_iw(self) -> bool:
        return self.prior_kind is PriorKind.IW


def _triangular_terms(
    factor: FloatArray, ystar: FloatArray, lower: bool
) -> tuple[float, FloatArray, FloatArray]:
    """(sum log|f_ii|, F^-1 Y, P^-1 Y) for Y = ystar^T and P = F F^T."""
    diagonal = np.diag(factor)
    if np.any(diagonal == 0):
        raise ZeroDiagonalError("Correlation factor has a zero diagonal entry")
    if not np.all(np.isfinite(ystar)):
        raise NonFiniteGradientError("Standardized data overflowed; log standard deviations are out of range")
    whitened = linalg.solve_triangular(factor, ystar.T, lower=lower, check_finite=False)
    solved = linalg.solve_triangular(factor.T, whitened, lower=not lower, check_finite=False)
    return float(np.sum(np.log(np.abs(diagonal)))), whitened, solved


def _standardized(tau: FloatArray, data: FloatArray, mu0: FloatArray | None) -> FloatArray:
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    centre = np.zeros(data.shape[1]) if mu0 is None else np.asarray(mu0, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        return np.asarray((data - centre) * np.exp(-np.asarray(tau, dtype=np.float64)))


def static_loglik_grad_tau(
    tau: FloatArray, factor: FloatArray, data: FloatArray, mu0: FloatArray | None = None, *, lower: bool = True
) -> tuple[float, FloatArray]:
    """Log-likelihood and its gradient in the log standard deviations."""
    tau = np.asarray(tau, dtype=np.float64)
    ystar = _standardized(tau, data, mu0)
    n_obs = ystar.shape[0]
    half_logdet, whitened, solved = _triangular_terms(np.asarray(factor, dtype=np.float64), ystar, lower)
    loglik = -n_obs * float(np.sum(tau)) - n_obs * half_logdet - 0.5 * float(np.sum(whitened**2))
    grad = -n_obs + np.sum(ystar.T * solved, axis=1)
    return loglik, grad


def static_loglik_grad_L(
    factor: FloatArray, tau: FloatArray, data: FloatArray, mu0: FloatArray | None = None, *, lower: bool = True
) -> tuple[float, FloatArray]:
    """Log-likelihood and its ambient gradient in the triangular factor.

    `lower=False` treats the factor as the upper reversed Cholesky U*; the
    gradient is then masked to the upper triangle.
    """
    factor = np.asarray(factor, dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    ystar = _standardized(tau, data, mu0)
    n_obs = ystar.shape[0]
    half_logdet, whitened, solved = _triangular_terms(factor, ystar, lower)
    loglik = -n_obs * float(np.sum(tau)) - n_obs * half_logdet - 0.5 * float(np.sum(whitened**2))
    grad = solved @ whitened.T
    grad = np.tril(grad) if lower else np.triu(grad)
    grad[np.diag_indices_from(grad)] -= n_obs / np.diag(factor)
    return loglik, grad


class IwConditional(NamedTuple):
    """Conditional log-priors of the inverse-Wishart prior in (tau, U*) and their gradients."""

    log_tau: float
    grad_tau: FloatArray
    log_u: float
    grad_u: FloatArray


def tau_exponents(dim: int, nu: float, jacobian: TauJacobian = TauJacobian.POLAR) -> FloatArray:
    """Coefficients c_i of the linear term sum c_i tau_i in log p(tau | U*)."""
    if jacobian is TauJacobian.POLAR:
        return np.full(dim, -float(nu))
    return np.arange(1, dim + 1) - (nu + dim)


def iw_conditional_logpriors(
    tau: FloatArray,
    upper: FloatArray,
    psi: FloatArray,
    nu: float,
    jacobian: TauJacobian = TauJacobian.POLAR,
) -> IwConditional:
    tau = np.asarray(tau, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    dim = tau.size
    diagonal = np.diag(upper)
    if np.any(diagonal == 0):
        raise ZeroDiagonalError("Reversed Cholesky factor has a zero diagonal entry")

    upper_inv = linalg.solve_triangular(upper, np.eye(dim), lower=False)
    corr_inv = upper_inv.T @ upper_inv
    scale_inv = np.exp(-tau)
    scaled_psi = scale_inv[:, None] * psi * scale_inv[None, :]
    trace = float(np.sum(scaled_psi * corr_inv))

    coefficients = tau_exponents(dim, nu, jacobian)
    log_tau = float(coefficients @ tau) - 0.5 * trace
    grad_tau = coefficients + np.diag(psi @ (scale_inv[:, None] * corr_inv)) * scale_inv

    u_exponents = np.arange(1, dim + 1) - (nu + dim + 1)
    log_u = float(u_exponents @ np.log(np.abs(diagonal))) - 0.5 * trace
    grad_u = np.triu(corr_inv @ scaled_psi @ upper_inv.T)
    grad_u[np.diag_indices(dim)] += u_exponents / diagonal
    return IwConditional(log_tau, grad_tau, log_u, grad_u)


def iw_direct_posterior(
    data: FloatArray, psi: FloatArray, nu: float, mu0: FloatArray, rng: np.random.Generator
) -> FloatArray:
    """Exact conjugate draw Sigma ~ IW(Psi + sum (y - mu0)(y - mu0)^T, nu + N) by Bartlett decomposition."""
    psi = np.atleast_2d(np.asarray(psi, dtype=np.float64))
    dim = psi.shape[0]
    centred = np.asarray(data, dtype=np.float64).reshape(-1, dim) - np.asarray(mu0, dtype=np.float64)
    scale = psi + centred.T @ centred
    dof = nu + centred.shape[0]
    if dof <= dim - 1:
        raise InvalidConfigError("Posterior degrees of freedom must exceed D - 1", {"dof": dof, "dim": dim})
    try:
        scale_inv = linalg.cho_solve(linalg.cho_factor(scale, lower=True), np.eye(dim))
        scale_inv_lower = linalg.cholesky(scale_inv, lower=True)
    except linalg.LinAlgError as e:
        raise NotPositiveDefiniteError(f"Posterior scale is not positive definite: {e}") from e

    bartlett = np.tril(rng.standard_normal((dim, dim)), -1)
    bartlett[np.diag_indices(dim)] = np.sqrt(rng.chisquare(dof - np.arange(dim)))
    wishart_lower = scale_inv_lower @ bartlett
    inverse = linalg.solve_triangular(wishart_lower, np.eye(dim), lower=True)
    return np.asarray(inverse.T @ inverse)


def _initial_corr(centred: FloatArray) -> FloatArray:
    """Shrunk sample correlation; off-diagonals stay away from 0 so zero-exponent priors are finite."""
    n_obs, dim = centred.shape
    target = 0.5 * (np.eye(dim) + np.ones((dim, dim)))
    if n_obs <= dim or dim == 1:
        return target if dim > 1 else np.eye(1)
    sample = np.atleast_2d(np.corrcoef(centred.T))
    return 0.9 * sample + 0.1 * target


@dataclass(frozen=True, eq=False)
class StaticDraws:
    """Retained draws of one static chain and its per-iteration traces."""

    sd: FloatArray
    corr: FloatArray
    cov: FloatArray
    factor: FloatArray
    traces: dict[str, FloatArray]
    acceptance: dict[str, float]

    @property
    def retained(self) -> int:
        return int(self.sd.shape[0])


class StaticChain:
    """Gibbs alternation of an HMC move on tau and a spherical HMC move on the factor rows."""

    def __init__(self, model: StaticNiwModel, schedule: ChainSchedule) -> None:
        self.model = model
        self.schedule = schedule
        self.layout = RowLayout(model.dim)
        self.rejections = RejectionCounter("static factor rows")

    def dense_factor(self, blocks: Blocks) -> FloatArray:
        """The factor the likelihood uses: L, or U* under the inverse-Wishart prior."""
        rows = self.layout.scatter(blocks, 1)[0]
        return np.ascontiguousarray(rows[::-1, ::-1]) if self.model.is_iw else rows

    def initial_state(self) -> tuple[FloatArray, list[FloatArray]]:
        model = self.model
        centred = model.data - model.mu0
        tau = np.log(np.std(centred, axis=0, ddof=1)) if model.n_obs >= 2 else np.zeros(model.dim)
        corr = _initial_corr(centred)
        if model.is_iw:
            rows = reversed_cholesky(corr)[::-1, ::-1]
        else:
            rows = corr_to_rows(corr).matrix
        return np.asarray(tau, dtype=np.float64), self.layout.gather(np.ascontiguousarray(rows)[None])

    def tau_target(self, factor: FloatArray) -> "TauTarget":
        return TauTarget(self.model, factor)

    def rows_target(self, tau: FloatArray) -> TargetOnSphereProduct:
        model = self.model
        layout = self.layout

        def evaluate(blocks: Blocks) -> tuple[float, list[FloatArray]]:
            factor = self.dense_factor(blocks)
            loglik, grad = static_loglik_grad_L(factor, tau, model.data, model.mu0, lower=not model.is_iw)
            if model.is_iw:
                conditional = iw_conditional_logpriors(tau, factor, model.psi, model.nu, model.tau_jacobian)
                total = loglik + conditional.log_u
                grad_blocks = layout.gather(np.ascontiguousarray((grad + conditional.grad_u)[::-1, ::-1])[None])
                return total, grad_blocks
            grad_blocks = layout.gather(grad[None])
            total = loglik
            for group, block, grad_block in zip(layout.groups, blocks, grad_blocks):
                prior = model.row_priors[int(group.rows[0]) - 1]
                total += float(np.sum(prior.log_terms(block)))
                grad_block += prior.grad(block)
            return total, grad_blocks

        return TargetOnSphereProduct(evaluate)

    def run(self, rng: np.random.Generator) -> StaticDraws:
        schedule = self.schedule
        dim = self.model.dim
        tau, blocks = self.initial_state()
        tau_da = da_init(schedule.step_size, schedule.target_accept)
        rows_da = da_init(schedule.step_size, schedule.target_accept)
        tau_monitor = DivergenceMonitor("log-sd HMC", schedule.divergence_window, schedule.divergence_floor)
        rows_monitor = DivergenceMonitor("factor rows", schedule.divergence_window, schedule.divergence_floor)

        keep = schedule.retained
        sd = np.empty((keep, dim))
        corr = np.empty((keep, dim, dim))
        factor_draws = np.empty((keep, dim, dim))
        traces = {
            name: np.zeros(schedule.iterations)
            for name in ("tau_accept_prob", "tau_step_size", "rows_accept_prob", "rows_step_size", "rows_steps")
        }
        accepted = {"tau": 0, "rows": 0}
        stored = 0

        logger.debug(f"Static chain: D={dim}, N={self.model.n_obs}, prior={self.model.prior_kind}")
        for iteration in range(schedule.iterations):
            adapting = schedule.is_adapting(iteration)
            with error_context("static sweep", iteration=iteration):
                h_tau = tau_da.step_size(adapting)
                factor = self.dense_factor(blocks)
                tau_move = hmc_step_euclidean(tau, self.tau_target(factor), h_tau, schedule.hmc_steps, rng)
                tau = tau_move.q

                h_rows = rows_da.step_size(adapting)
                rows_prob = 1.0
                rows_steps = 0
                if self.layout.groups:
                    rows_move = delta_sphhmc_step(
                        blocks, self.rows_target(tau), schedule.sphhmc(h_rows), rng, self.rejections
                    )
                    blocks = rows_move.q
                    rows_prob = rows_move.accept_prob
                    rows_steps = rows_move.steps
                    accepted["rows"] += int(rows_move.accepted)

            accepted["tau"] += int(tau_move.accepted)
            traces["tau_accept_prob"][iteration] = tau_move.accept_prob
            traces["tau_step_size"][iteration] = h_tau
            traces["rows_accept_prob"][iteration] = rows_prob
            traces["rows_step_size"][iteration] = h_rows
            traces["rows_steps"][iteration] = rows_steps

            if adapting:
                tau_da = dual_averaging_update(tau_da, tau_move.accept_prob)
                if self.layout.groups:
                    rows_da = dual_averaging_update(rows_da, rows_prob)
            else:
                tau_monitor.record(tau_move.accept_prob, iteration)
                if self.layout.groups:
                    rows_monitor.record(rows_prob, iteration)

            if schedule.keeps(iteration):
                rows = self.layout.scatter(blocks, 1)[0]
                CorrCholesky(rows)  # raises if a retained factor left the sphere product
                factor = self.dense_factor(blocks)
                corr_draw = factor @ factor.T
                sd[stored] = np.exp(tau)
                corr[stored] = corr_draw
                factor_draws[stored] = factor
                stored += 1

        self.rejections.log_summary()
        cov = sd[:, :, None] * corr * sd[:, None, :]
        acceptance = {name: count / schedule.iterations for name, count in accepted.items()}
        logger.debug(f"Static chain done: acceptance {acceptance}")
        return StaticDraws(sd, corr, cov, factor_draws, traces, acceptance)


@dataclass(frozen=True)
class TauTarget:
    """log p(tau | factor, data) with its gradient, as a callable for Euclidean HMC."""

    model: StaticNiwModel
    factor: FloatArray

    def __call__(self, tau: FloatArray) -> tuple[float, FloatArray]:
        model = self.model
        loglik, grad = static_loglik_grad_tau(tau, self.factor, model.data, model.mu0, lower=not model.is_iw)
        if model.is_iw:
            conditional = iw_conditional_logpriors(tau, self.factor, model.psi, model.nu, model.tau_jacobian)
            return loglik + conditional.log_tau, grad + conditional.grad_tau
        variance = model.tau_prior_sd**2
        return loglik - 0.5 * float(np.sum(tau**2)) / variance, grad - tau / variance


def run_static_chain(model: StaticNiwModel, schedule: ChainSchedule, rng: np.random.Generator) -> StaticDraws:
    return StaticChain(model, schedule).run(rng)
