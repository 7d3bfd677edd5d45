"""Points, tangent vectors and geodesic flow on S^{d-1}(r).

The row-batched kernels (`project_rows`, `rotate_rows`) work on arrays whose
last axis holds coordinates, so a whole product of equal-dimension spheres
moves in one call. `SpherePoint`/`TangentVector` are the validated
single-sphere views over the same kernels.
"""

from dataclasses import dataclass, field

import numpy as np

from src.utils.errors import DimensionMismatchError, RowNotUnitNormError
from src.utils.types import FloatArray

NORM_TOL = 1e-9


def _frozen(values: FloatArray) -> FloatArray:
    out = np.array(values, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpherePoint:
    """A point q on the sphere of radius r in R^d."""

    coords: FloatArray
    radius: float = 1.0

    def __post_init__(self) -> None:
        coords = _frozen(np.atleast_1d(self.coords))
        if coords.ndim != 1 or coords.size < 1:
            raise DimensionMismatchError("Sphere point needs a non-empty vector", {"ndim": coords.ndim})
        if self.radius <= 0:
            raise RowNotUnitNormError("Sphere radius must be positive", {"radius": self.radius})
        deviation = abs(float(np.linalg.norm(coords)) - self.radius)
        if deviation > NORM_TOL * self.radius:
            raise RowNotUnitNormError(
                "Point is off the sphere", {"radius": self.radius, "deviation": deviation}
            )
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return int(self.coords.size)

    @classmethod
    def from_vector(cls, x: FloatArray, radius: float = 1.0) -> "SpherePoint":
        """Radially project a nonzero vector onto the sphere."""
        x = np.asarray(x, dtype=np.float64)
        return cls(radius * x / np.linalg.norm(x), radius)


@dataclass(frozen=True)
class TangentVector:
    """A velocity v orthogonal to its base point."""

    base: SpherePoint
    vec: FloatArray = field(repr=False)

    def __post_init__(self) -> None:
        vec = _frozen(np.atleast_1d(self.vec))
        if vec.shape != self.base.coords.shape:
            raise DimensionMismatchError(
                "Tangent vector and base point differ in dimension",
                {"base_dim": self.base.dim, "vec_dim": vec.size},
            )
        inner = abs(float(self.base.coords @ vec))
        if inner > NORM_TOL * self.base.radius * max(float(np.linalg.norm(vec)), 1.0):
            raise DimensionMismatchError("Vector is not tangent to its base point", {"inner": inner})
        object.__setattr__(self, "vec", vec)


def project_rows(q: FloatArray, g: FloatArray, radius: float = 1.0) -> FloatArray:
    """Apply (I - r^-2 q q^T) to g row by row."""
    if q.shape != g.shape:
        raise DimensionMismatchError("Projection needs matching shapes", {"q": str(q.shape), "g": str(g.shape)})
    inner = np.sum(q * g, axis=-1, keepdims=True)
    return g - inner * q / radius**2


def rotate_rows(q: FloatArray, v: FloatArray, h: float, radius: float = 1.0) -> tuple[FloatArray, FloatArray]:
    """Follow each row's great circle for time h; rows with v = 0 stay put."""
    speed = np.linalg.norm(v, axis=-1, keepdims=True)
    angle = speed * h / radius
    cos, sin = np.cos(angle), np.sin(angle)
    direction = np.divide(v, speed, out=np.zeros_like(v), where=speed > 0)
    q_new = q * cos + radius * direction * sin
    v_new = -q * speed / radius * sin + v * cos
    return q_new, v_new


def project_tangent(q: SpherePoint, g: FloatArray) -> TangentVector:
    g = np.asarray(g, dtype=np.float64)
    if g.shape != q.coords.shape:
        raise DimensionMismatchError("Gradient and point differ in dimension", {"q_dim": q.dim, "g_dim": g.size})
    return TangentVector(q, project_rows(q.coords, g, q.radius))


def geodesic_rotate(q: SpherePoint, v: TangentVector, h: float) -> tuple[SpherePoint, TangentVector]:
    if not np.any(v.vec):
        return q, v
    coords, vec = rotate_rows(q.coords, v.vec, h, q.radius)
    q_new = SpherePoint(coords, q.radius)
    return q_new, TangentVector(q_new, vec)
