"""MCMC building blocks."""

from src.samplers.adaptation import DualAvgState, da_init, dual_averaging_update
from src.samplers.gibbs import gibbs_gamma, gibbs_mu
from src.samplers.hmc import hmc_step_euclidean
from src.samplers.slice import ess_step, slice_step_1d
from src.samplers.sphhmc import (
    SphHmcConfig,
    TargetOnSphereProduct,
    delta_sphhmc_step,
    sphhmc_accept_delta,
    sphhmc_leapfrog,
    stop_stochastic,
    stop_two_orthants,
)

__all__ = [
    "DualAvgState",
    "SphHmcConfig",
    "TargetOnSphereProduct",
    "da_init",
    "delta_sphhmc_step",
    "dual_averaging_update",
    "ess_step",
    "gibbs_gamma",
    "gibbs_mu",
    "hmc_step_euclidean",
    "slice_step_1d",
    "sphhmc_accept_delta",
    "sphhmc_leapfrog",
    "stop_stochastic",
    "stop_two_orthants",
]
