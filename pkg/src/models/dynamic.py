"""Dynamic correlation model: mean, log-sd and Cholesky rows evolve as GPs over time.

y_mn ~ N(mu_n, diag(sigma_n) L_n L_n^T diag(sigma_n)) for trial m at time n.
Cholesky grids are held in banded storage (N, D, w) (see `RowLayout`), so a
likelihood evaluation costs O(N D w^2 M) and never forms D x D matrices.
"""

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from src.geometry.cholesky import POLE_TOL, CorrCholesky
from src.geometry.layout import RowLayout
from src.geometry.sphere import NORM_TOL
from src.gp.densities import HyperPrior, hyper_logpdfs, vgp_logpdf
from src.gp.kernel import GramCache, GramFactor, TimeGrid
from src.io.tensors import TrialTensor
from src.model.dto.experiment import GpBlock
from src.models.schedule import ChainSchedule, DivergenceMonitor
from src.samplers.adaptation import da_init, dual_averaging_update
from src.samplers.gibbs import gibbs_gamma, gibbs_mu, gibbs_mu_by_channel
from src.samplers.slice import ess_step, slice_step_1d
from src.samplers.sphhmc import SphHmcConfig, SphHmcTransition, TargetOnSphereProduct, delta_sphhmc_step
from src.utils.error_handling import RejectionCounter, error_context
from src.utils.errors import InvalidConfigError, NonPositiveGammaError, RowNotUnitNormError, ZeroDiagonalError
from src.utils.types import Blocks, FloatArray

logger = logging.getLogger(__name__)

BLOCK_INDEX = {GpBlock.MEAN: 0, GpBlock.LOG_SD: 1, GpBlock.CHOL: 2}
DEFAULT_HYPERPRIORS = (
    HyperPrior(a=1.0, b=0.1, m=0.0, v=1.0),
    HyperPrior(a=1.0, b=1e-3, m=0.0, v=0.5),
    HyperPrior(a=1.0, b=0.2, m=0.0, v=1.0),
)


@dataclass(frozen=True, eq=False)
class DynamicCorrModel:
    data: TrialTensor
    hyper: tuple[HyperPrior, HyperPrior, HyperPrior] = DEFAULT_HYPERPRIORS
    smoothness: float = 2.0
    band: int | None = None
    sample_mean: bool = True
    sample_variance: bool = True
    nugget: float = 1e-5
    grid: TimeGrid = field(init=False)
    layout: RowLayout = field(init=False)

    def __post_init__(self) -> None:
        if not 0 < self.smoothness <= 2:
            raise InvalidConfigError("Smoothness exponent must lie in (0, 2]", {"s": self.smoothness})
        if len(self.hyper) != 3:
            raise InvalidConfigError("One hyperprior per GP block (mean, log-sd, chol) is required")
        object.__setattr__(self, "grid", self.data.grid())
        object.__setattr__(self, "layout", RowLayout(self.dim, self.band))

    @property
    def trials(self) -> int:
        return self.data.shape[0]

    @property
    def n_times(self) -> int:
        return self.data.shape[1]

    @property
    def dim(self) -> int:
        return self.data.shape[2]

    def plug_in_mean(self) -> FloatArray:
        """Per-time mean across trials; the per-channel mean across time for a single trial."""
        values = self.data.values
        if self.trials >= 2:
            return np.asarray(values.mean(axis=0))
        return np.broadcast_to(values[0].mean(axis=0), (self.n_times, self.dim)).copy()

    def plug_in_log_sd(self) -> FloatArray:
        """Log of the per-time sd across trials; steady per-channel sd across time for a single trial."""
        values = self.data.values
        if self.trials >= 2:
            sd = values.std(axis=0, ddof=1)
        else:
            sd = np.broadcast_to(values[0].std(axis=0, ddof=1), (self.n_times, self.dim))
        if np.any(sd <= 0):
            raise InvalidConfigError("Plug-in standard deviation is zero for some channel")
        return np.log(sd)


@dataclass(frozen=True, eq=False)
class ChainState:
    mu: FloatArray
    tau: FloatArray
    chol: FloatArray
    gammas: tuple[float, float, float] = (1.0, 1.0, 1.0)
    etas: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def factors(self, layout: RowLayout) -> list[CorrCholesky]:
        return [CorrCholesky(factor) for factor in layout.band_to_dense(self.chol)]

    def correlations(self, layout: RowLayout) -> FloatArray:
        dense = layout.band_to_dense(self.chol)
        return np.asarray(dense @ np.swapaxes(dense, -1, -2))

    def audit(self) -> None:
        """Unit rows, diagonals off the equator, positive scales."""
        deviation = float(np.max(np.abs(np.linalg.norm(self.chol, axis=-1) - 1.0)))
        if deviation > NORM_TOL:
            raise RowNotUnitNormError("Cholesky rows drifted off the sphere", {"deviation": deviation})
        if np.any(np.abs(self.chol[:, :, -1]) <= POLE_TOL):
            raise ZeroDiagonalError("Cholesky diagonal reached the equator")
        if min(self.gammas) <= 0:
            raise NonPositiveGammaError("Kernel scales must stay positive", {"gammas": str(self.gammas)})


def standardize(y: FloatArray, mu: FloatArray, tau: FloatArray) -> FloatArray:
    """y* = (y - mu) e^-tau arranged as (N, D, M)."""
    return np.ascontiguousarray(((y - mu[None]) * np.exp(-tau)[None]).transpose(1, 2, 0))


def banded_forward(band: FloatArray, rhs: FloatArray) -> FloatArray:
    """X = L^-1 rhs per time point; rhs is (N, D, M)."""
    _, dim, width = band.shape
    out = np.empty_like(rhs)
    for row in range(dim):
        lo = max(0, row - width + 1)
        acc = rhs[:, row]
        if row > lo:
            coeffs = band[:, row, width - 1 - (row - lo) : width - 1]
            acc = acc - np.einsum("nj,njm->nm", coeffs, out[:, lo:row])
        out[:, row] = acc / band[:, row, width - 1, None]
    return out


def banded_backward(band: FloatArray, rhs: FloatArray) -> FloatArray:
    """Z = L^-T rhs per time point."""
    _, dim, width = band.shape
    out = np.empty_like(rhs)
    for col in reversed(range(dim)):
        hi = min(dim - 1, col + width - 1)
        acc = rhs[:, col]
        if hi > col:
            rows = np.arange(col + 1, hi + 1)
            coeffs = band[:, rows, width - 1 - (rows - col)]
            acc = acc - np.einsum("ni,nim->nm", coeffs, out[:, col + 1 : hi + 1])
        out[:, col] = acc / band[:, col, width - 1, None]
    return out


def chol_loglik(band: FloatArray, ystar: FloatArray) -> tuple[float, FloatArray]:
    """-M sum log|L_n| - 1/2 sum |L_n^-1 y*|^2 and the whitened data."""
    whitened = banded_forward(band, ystar)
    logdet = float(np.sum(np.log(np.abs(band[:, :, -1]))))
    return -ystar.shape[2] * logdet - 0.5 * float(np.sum(whitened**2)), whitened


def chol_loglik_grad_blocks(
    band: FloatArray, ystar: FloatArray, layout: RowLayout
) -> tuple[float, list[FloatArray], FloatArray]:
    """Factor log-likelihood, its gradient per row block, and the gradient of l_11 per time point."""
    trials = ystar.shape[2]
    value, whitened = chol_loglik(band, ystar)
    solved = banded_backward(band, whitened)
    diagonal = band[:, :, -1]
    grads = []
    for group in layout.groups:
        grad = np.einsum("nrm,nrdm->nrd", solved[:, group.rows], whitened[:, group.cols])
        grad[:, :, -1] -= trials / diagonal[:, group.rows]
        grads.append(grad.reshape(-1, group.dim))
    first = np.einsum("nm,nm->n", solved[:, 0], whitened[:, 0]) - trials / diagonal[:, 0]
    return value, grads, first


def dynamic_loglik(y: FloatArray, mu: FloatArray, tau: FloatArray, band: FloatArray) -> float:
    value, _ = chol_loglik(band, standardize(y, mu, tau))
    return value - y.shape[0] * float(np.sum(tau))


def dynamic_loglik_grad_L(state: ChainState, model: DynamicCorrModel) -> tuple[float, FloatArray]:
    """Log-likelihood and its (N, D, D) lower-triangular gradient; entries outside the band are 0."""
    layout = model.layout
    y = model.data.values
    value, grads, first = chol_loglik_grad_blocks(state.chol, standardize(y, state.mu, state.tau), layout)
    dense = layout.scatter(grads, model.n_times)
    dense[:, 0, 0] = first
    return value - model.trials * float(np.sum(state.tau)), dense


@dataclass
class SweepSamplers:
    """Per-chain sampler state carried from sweep to sweep."""

    cache: GramCache
    sphhmc: SphHmcConfig = field(default_factory=SphHmcConfig)
    slice_width: float = 1.0
    max_stepout: int = 50
    rejections: RejectionCounter = field(default_factory=lambda: RejectionCounter("dynamic factor rows"))


class SweepOutcome(NamedTuple):
    state: ChainState
    chol: SphHmcTransition


def _chol_target(model: DynamicCorrModel, ystar: FloatArray, prior_factor: GramFactor) -> TargetOnSphereProduct:
    layout = model.layout
    n_times = model.n_times

    def evaluate(blocks: Blocks) -> tuple[float, list[FloatArray]]:
        band = layout.blocks_to_band(blocks, n_times)
        with np.errstate(divide="ignore", invalid="ignore"):
            value, grads, _ = chol_loglik_grad_blocks(band, ystar, layout)
        centred = layout.stack_centered(blocks, n_times)
        solved = prior_factor.solve(centred)
        value -= 0.5 * float(np.sum(centred * solved))
        for grad, prior_grad in zip(grads, layout.split_stacked(solved, n_times)):
            grad -= prior_grad
        return value, grads

    return TargetOnSphereProduct(evaluate)


def mwg_sweep(
    state: ChainState, model: DynamicCorrModel, samplers: SweepSamplers, rng: np.random.Generator
) -> SweepOutcome:
    """One Metropolis-within-Gibbs scan: gamma, eta, mean, log-sd, Cholesky rows."""
    layout = model.layout
    n_times = model.n_times
    y = model.data.values
    cache = samplers.cache
    cache.invalidate(keep=state.etas)

    blocks = layout.band_to_blocks(state.chol)
    gp_fields = {
        GpBlock.MEAN: state.mu,
        GpBlock.LOG_SD: state.tau,
        GpBlock.CHOL: layout.stack_centered(blocks, n_times),
    }
    active = [GpBlock.MEAN] if model.sample_mean else []
    active += [GpBlock.LOG_SD] if model.sample_variance else []
    active.append(GpBlock.CHOL)

    gammas = list(state.gammas)
    etas = list(state.etas)
    with error_context("scale update", stage="gamma"):
        for which in active:
            k = BLOCK_INDEX[which]
            z = gp_fields[which]
            quad = cache.base(etas[k]).quad_trace(z)
            gammas[k] = gibbs_gamma(quad, n_times, model.dim, which, model.hyper[k], rng, n_components=z.size)

    with error_context("length-scale update", stage="eta"):
        for which in active:
            k = BLOCK_INDEX[which]

            def logpost(eta: float, z: FloatArray = gp_fields[which], k: int = k) -> float:
                return vgp_logpdf(z, cache.gram(gammas[k], eta)) + hyper_logpdfs(gammas[k], eta, model.hyper[k])[1]

            etas[k] = slice_step_1d(etas[k], logpost, rng, samplers.slice_width, samplers.max_stepout)

    mu = state.mu
    if model.sample_mean:
        with error_context("mean update", stage="mu"):
            sd = np.exp(state.tau)
            cov = sd[:, :, None] * state.correlations(layout) * sd[:, None, :]
            prior = cache.gram(gammas[0], etas[0])
            if layout.is_full:
                mu = gibbs_mu(y, cov, prior, rng)
            else:
                mu = gibbs_mu_by_channel(y, cov, prior, state.mu, rng)

    tau = state.tau
    if model.sample_variance:
        with error_context("log-sd update", stage="tau"):
            tau, _ = ess_step(
                tau, cache.gram(gammas[1], etas[1]), lambda t: dynamic_loglik(y, mu, t, state.chol), rng
            )

    chol = state.chol
    transition = SphHmcTransition([], True, 1.0, 0, 0.0)
    if layout.groups:
        with error_context("Cholesky update", stage="chol"):
            target = _chol_target(model, standardize(y, mu, tau), cache.gram(gammas[2], etas[2]))
            transition = delta_sphhmc_step(blocks, target, samplers.sphhmc, rng, samplers.rejections)
            chol = layout.blocks_to_band(transition.q, n_times)

    new_state = ChainState(mu, tau, chol, (gammas[0], gammas[1], gammas[2]), (etas[0], etas[1], etas[2]))
    return SweepOutcome(new_state, transition)


@dataclass(frozen=True, eq=False)
class DynamicDraws:
    """Retained draws of one dynamic chain, each (S, N, K), and per-iteration traces."""

    mu: FloatArray
    sd: FloatArray
    corr: FloatArray
    cov: FloatArray
    chol: FloatArray
    traces: dict[str, FloatArray]
    acceptance: dict[str, float]

    @property
    def retained(self) -> int:
        return int(self.mu.shape[0])


TRACE_NAMES = (
    "chol_accept_prob",
    "chol_step_size",
    "chol_steps",
    "gamma_mean",
    "gamma_log_sd",
    "gamma_chol",
    "eta_mean",
    "eta_log_sd",
    "eta_chol",
)


class DynamicChain:
    def __init__(self, model: DynamicCorrModel, schedule: ChainSchedule) -> None:
        self.model = model
        self.schedule = schedule

    def initial_state(self) -> ChainState:
        """Rows at their poles; mean and log-sd at 0 unless held at plug-in values."""
        model = self.model
        layout = model.layout
        shape = (model.n_times, model.dim)
        mu = np.zeros(shape) if model.sample_mean else model.plug_in_mean()
        tau = np.zeros(shape) if model.sample_variance else model.plug_in_log_sd()
        chol = layout.blocks_to_band(layout.pole_blocks(model.n_times), model.n_times)
        etas = (model.hyper[0].m, model.hyper[1].m, model.hyper[2].m)
        return ChainState(mu, tau, chol, (1.0, 1.0, 1.0), etas)

    def run(self, rng: np.random.Generator, state: ChainState | None = None) -> DynamicDraws:
        model = self.model
        schedule = self.schedule
        layout = model.layout
        state = self.initial_state() if state is None else state
        samplers = SweepSamplers(GramCache(model.grid, model.smoothness, model.nugget))
        step = da_init(schedule.step_size, schedule.target_accept)
        monitor = DivergenceMonitor("Cholesky rows", schedule.divergence_window, schedule.divergence_floor)

        pair_rows, pair_cols = layout.pair_indices()
        entry_rows, entry_cols = layout.entry_indices()
        keep = schedule.retained
        shape = (keep, model.n_times)
        mu = np.empty(shape + (model.dim,))
        sd = np.empty(shape + (model.dim,))
        corr = np.empty(shape + (pair_rows.size,))
        cov = np.empty(shape + (entry_rows.size,))
        chol = np.empty(shape + (entry_rows.size,))
        traces = {name: np.zeros(schedule.iterations) for name in TRACE_NAMES}
        accepted = 0
        stored = 0

        logger.debug(
            f"Dynamic chain: M={model.trials}, N={model.n_times}, D={model.dim}, band={layout.band}, "
            f"sample_mean={model.sample_mean}, sample_variance={model.sample_variance}"
        )
        for iteration in range(schedule.iterations):
            adapting = schedule.is_adapting(iteration)
            h = step.step_size(adapting)
            samplers.sphhmc = schedule.sphhmc(h)
            with error_context("dynamic sweep", iteration=iteration):
                outcome = mwg_sweep(state, model, samplers, rng)
            state = outcome.state
            accepted += int(outcome.chol.accepted)

            traces["chol_accept_prob"][iteration] = outcome.chol.accept_prob
            traces["chol_step_size"][iteration] = h
            traces["chol_steps"][iteration] = outcome.chol.steps
            for k, suffix in enumerate(("mean", "log_sd", "chol")):
                traces[f"gamma_{suffix}"][iteration] = state.gammas[k]
                traces[f"eta_{suffix}"][iteration] = state.etas[k]

            if adapting:
                step = dual_averaging_update(step, outcome.chol.accept_prob)
            elif layout.groups:
                monitor.record(outcome.chol.accept_prob, iteration)

            if schedule.keeps(iteration):
                state.audit()
                scale = np.exp(state.tau)
                full_corr = state.correlations(layout)
                mu[stored] = state.mu
                sd[stored] = scale
                corr[stored] = full_corr[:, pair_rows, pair_cols]
                cov[stored] = scale[:, entry_rows] * full_corr[:, entry_rows, entry_cols] * scale[:, entry_cols]
                chol[stored] = layout.band_entries(state.chol)
                stored += 1

        samplers.rejections.log_summary()
        acceptance = {"chol": accepted / schedule.iterations}
        logger.debug(f"Dynamic chain done: acceptance {acceptance}")
        return DynamicDraws(mu, sd, corr, cov, chol, traces, acceptance)


def run_dynamic_chain(model: DynamicCorrModel, schedule: ChainSchedule, rng: np.random.Generator) -> DynamicDraws:
    return DynamicChain(model, schedule).run(rng)
