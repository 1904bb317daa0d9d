import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil.nilgeom import (Direction, GroupPoint, adapted_frame, bracket, center_rotation, dilate,
                             fibonacci_sphere, from_adapted, omega_pairing, radical_direction, to_adapted)

vec = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3).map(np.array)
unit = vec.filter(lambda v: np.linalg.norm(v) > 1e-3)


def test_basis_brackets():
    e = np.eye(3)
    assert np.array_equal(bracket(e[0], e[1]), e[2])
    assert np.array_equal(bracket(e[1], e[2]), e[0])
    assert np.array_equal(bracket(e[2], e[0]), e[1])


@given(vec, vec)
def test_bracket_antisymmetric(u, w):
    assert np.allclose(bracket(u, w), -bracket(w, u), atol=1e-12)


@given(unit, st.floats(-np.pi, np.pi))
def test_adapted_frame_properties(w, gauge):
    d = Direction.normalized(w)
    f = adapted_frame(d, gauge)
    assert np.allclose(f.R @ f.R.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(f.R) == pytest.approx(1.0, abs=1e-12)
    assert omega_pairing(d, f.X, f.Y) == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(bracket(radical_direction(d), f.X) @ d.omega, 0, atol=1e-12)


@given(unit, vec, vec)
def test_rotation_is_automorphism(w, a, b):
    R = adapted_frame(Direction.normalized(w)).R
    assert np.allclose(center_rotation(R) @ bracket(a, b), bracket(R @ a, R @ b), atol=1e-9)


def test_direction_rejects_non_unit():
    with pytest.raises(ValueError):
        Direction(np.array([1.0, 1.0, 0.0]))


@given(unit, vec, vec)
def test_adapted_coordinates_round_trip(w, x, z):
    d = Direction.normalized(w)
    p = GroupPoint(x, z)
    q = from_adapted(d, to_adapted(d, p))
    assert np.allclose(q.x, x, atol=1e-9) and np.allclose(q.z, z, atol=1e-9)


def test_dilation_scales_layers():
    p = dilate(GroupPoint(np.ones(3), np.ones(3)), 2.0)
    assert np.allclose(p.x, 2) and np.allclose(p.z, 4)


def test_fibonacci_sphere_unit():
    pts = fibonacci_sphere(50)
    assert pts.shape == (50, 3)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1)
