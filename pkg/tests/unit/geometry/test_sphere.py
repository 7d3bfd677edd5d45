import numpy as np
import pytest

from src.geometry.sphere import (
    SpherePoint,
    TangentVector,
    geodesic_rotate,
    project_rows,
    project_tangent,
    rotate_rows,
)
from src.utils.errors import DimensionMismatchError, RowNotUnitNormError


def test_project_tangent_drops_the_pole_component():
    v = project_tangent(SpherePoint(np.array([1.0, 0.0, 0.0])), np.array([2.0, 3.0, 4.0]))
    np.testing.assert_allclose(v.vec, [0.0, 3.0, 4.0])


def test_project_tangent_annihilates_radial_gradient():
    v = project_tangent(SpherePoint(np.array([0.0, 0.0, 1.0])), np.array([0.0, 0.0, 5.0]))
    np.testing.assert_allclose(v.vec, 0.0)


def test_project_tangent_is_orthogonal_and_idempotent():
    rng = np.random.default_rng(0)
    for _ in range(20):
        q = SpherePoint.from_vector(rng.normal(size=3))
        g = rng.normal(size=3)
        v = project_tangent(q, g)
        assert abs(q.coords @ v.vec) < 1e-12
        np.testing.assert_allclose(project_rows(q.coords, v.vec), v.vec, atol=1e-12)


def test_geodesic_rotate_quarter_circle():
    q = SpherePoint(np.array([1.0, 0.0]))
    v = TangentVector(q, np.array([0.0, 1.0]))
    q_new, v_new = geodesic_rotate(q, v, np.pi / 2)
    np.testing.assert_allclose(q_new.coords, [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(v_new.vec, [-1.0, 0.0], atol=1e-12)


def test_geodesic_rotate_with_zero_velocity_is_identity():
    q = SpherePoint(np.array([0.6, 0.8]))
    v = TangentVector(q, np.zeros(2))
    q_new, v_new = geodesic_rotate(q, v, 0.3)
    assert q_new is q
    assert v_new is v


def test_geodesic_rotate_half_circle_on_radius_two():
    q = SpherePoint(np.array([2.0, 0.0]), radius=2.0)
    v = TangentVector(q, np.array([0.0, 2.0]))
    q_new, _ = geodesic_rotate(q, v, np.pi)
    np.testing.assert_allclose(q_new.coords, [-2.0, 0.0], atol=1e-12)


def test_rotate_rows_preserves_norm_and_speed():
    rng = np.random.default_rng(1)
    q = rng.normal(size=(50, 4))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    v = project_rows(q, rng.normal(size=(50, 4)))
    q_new, v_new = rotate_rows(q, v, 0.37)
    np.testing.assert_allclose(np.linalg.norm(q_new, axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(v_new, axis=1), np.linalg.norm(v, axis=1), atol=1e-12)
    np.testing.assert_allclose(np.sum(q_new * v_new, axis=1), 0.0, atol=1e-12)


def test_sphere_point_rejects_off_sphere_coordinates():
    with pytest.raises(RowNotUnitNormError):
        SpherePoint(np.array([1.0, 1.0]))


def test_tangent_vector_rejects_radial_component():
    with pytest.raises(DimensionMismatchError):
        TangentVector(SpherePoint(np.array([1.0, 0.0])), np.array([1.0, 0.0]))


def test_sphere_point_is_read_only():
    q = SpherePoint(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        q.coords[0] = 1.0
