"""Static and dynamic covariance models, the periodic generator and posterior summaries."""

from src.models.dynamic import (
    ChainState,
    DynamicCorrModel,
    dynamic_loglik,
    dynamic_loglik_grad_L,
    mwg_sweep,
    run_dynamic_chain,
)
from src.models.periodic import TruthRecord, generate_periodic
from src.models.schedule import ChainSchedule
from src.models.static import (
    StaticNiwModel,
    iw_conditional_logpriors,
    iw_direct_posterior,
    run_static_chain,
    static_loglik_grad_L,
    static_loglik_grad_tau,
)
from src.models.summary import frobenius_distance_curve, spectral_error_curve, summarize_posterior

__all__ = [
    "ChainSchedule",
    "ChainState",
    "DynamicCorrModel",
    "StaticNiwModel",
    "TruthRecord",
    "dynamic_loglik",
    "dynamic_loglik_grad_L",
    "frobenius_distance_curve",
    "generate_periodic",
    "iw_conditional_logpriors",
    "iw_direct_posterior",
    "mwg_sweep",
    "run_dynamic_chain",
    "run_static_chain",
    "spectral_error_curve",
    "static_loglik_grad_L",
    "static_loglik_grad_tau",
    "summarize_posterior",
]
