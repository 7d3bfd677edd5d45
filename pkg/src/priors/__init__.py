"""Distributions on spheres used as priors for Cholesky rows."""

from src.priors.base import SpherePrior, UniformPrior
from src.priors.directional import (
    BinghamParams,
    UnitVecGaussParams,
    VmfParams,
    bingham_grad,
    bingham_logpdf,
    uvgauss_grad,
    uvgauss_logpdf,
    vmf_grad,
    vmf_logpdf,
)
from src.priors.sqdirichlet import (
    SqDirichletParams,
    jointly_uniform_alpha,
    marginally_uniform_alpha,
    marginally_uniform_pole_alpha,
    sqdir_grad,
    sqdir_logpdf,
    sqdir_sample,
)

__all__ = [
    "BinghamParams",
    "SpherePrior",
    "SqDirichletParams",
    "UniformPrior",
    "UnitVecGaussParams",
    "VmfParams",
    "bingham_grad",
    "bingham_logpdf",
    "jointly_uniform_alpha",
    "marginally_uniform_alpha",
    "marginally_uniform_pole_alpha",
    "sqdir_grad",
    "sqdir_logpdf",
    "sqdir_sample",
    "uvgauss_grad",
    "uvgauss_logpdf",
    "vmf_grad",
    "vmf_logpdf",
]
