"""Gaussian process priors over time grids."""

from src.gp.densities import HyperPrior, hyper_logpdfs, uvgp_grad, uvgp_logpdf, vgp_logpdf
from src.gp.kernel import GramCache, GramFactor, KernelParams, TimeGrid, build_gram, factorize_gram

__all__ = [
    "GramCache",
    "GramFactor",
    "HyperPrior",
    "KernelParams",
    "TimeGrid",
    "build_gram",
    "factorize_gram",
    "hyper_logpdfs",
    "uvgp_grad",
    "uvgp_logpdf",
    "vgp_logpdf",
]
