"""Spheres, products of spheres and the Cholesky factors built from them."""

from src.geometry.cholesky import (
    CorrCholesky,
    CovCholesky,
    corr_to_rows,
    logdet_jacobian_l_to_p,
    logdet_jacobian_sigma_to_u,
    reversed_cholesky,
    rows_to_corr,
    vech,
)
from src.geometry.layout import RowLayout
from src.geometry.sphere import SpherePoint, TangentVector, geodesic_rotate, project_tangent

__all__ = [
    "CorrCholesky",
    "CovCholesky",
    "RowLayout",
    "SpherePoint",
    "TangentVector",
    "corr_to_rows",
    "geodesic_rotate",
    "logdet_jacobian_l_to_p",
    "logdet_jacobian_sigma_to_u",
    "project_tangent",
    "reversed_cholesky",
    "rows_to_corr",
    "vech",
]
