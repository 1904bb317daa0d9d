import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil import centralft as cft
from freenil.corpus import analytic_corpus
from freenil.nilgeom import Direction, GroupPoint, adapted_frame
from freenil.quadrature import QuadratureSpec

small = st.floats(-1.5, 1.5, allow_nan=False)
vec3 = st.tuples(small, small, small)
width = st.floats(0.2, 3.0)
exps = st.tuples(st.integers(0, 2), st.integers(0, 1), st.integers(0, 1))


@st.composite
def analytic_fns(draw):
    f = cft.AnalyticFn.zero()
    for _ in range(draw(st.integers(1, 3))):
        poly = {draw(exps): draw(small) + 1j * draw(small)}
        f = f + cft.AnalyticFn.gaussian(draw(width), draw(width), draw(small) + 0.5j, poly, draw(vec3), draw(vec3))
    return f


@given(analytic_fns())
def test_json_round_trip(f):
    g = cft.AnalyticFn.from_json(f.to_json())
    assert g.to_json() == f.to_json()
    x, z = np.array([0.3, -0.2, 0.1]), np.array([0.5, 0.0, -0.4])
    assert g(x, z) == f(x, z)


def test_json_rejects_foreign_documents():
    with pytest.raises(ValueError):
        cft.AnalyticFn.from_json(json.dumps({"schema": "other"}))
    doc = json.loads(cft.AnalyticFn.gaussian().to_json())
    doc["version"] = 99
    with pytest.raises(ValueError):
        cft.AnalyticFn.from_json(doc)


@pytest.mark.parametrize("kw", [{"a": 0.0}, {"b": -1.0}, {"poly": {(5, 0, 0): 1.0}}])
def test_term_validation(kw):
    with pytest.raises(ValueError):
        cft.AnalyticFn.gaussian(**kw)


@given(analytic_fns(), st.floats(0.3, 3.0))
def test_dilation_composes_with_group_dilation(f, eps):
    x, z = np.array([0.3, -0.2, 0.1]), np.array([0.5, 0.0, -0.4])
    assert abs(f.dilate(eps)(x, z) - f(eps * x, eps**2 * z)) < 1e-10 * max(1.0, abs(f(eps * x, eps**2 * z)))


@given(analytic_fns(), analytic_fns(), small, small)
def test_central_transform_is_linear(f, g, a, b):
    mu, x = np.array([0.4, -0.7, 0.2]), np.array([[0.1, 0.2, 0.3]])
    lhs = cft.central_transform_values(f * a + g * b, mu, x)
    rhs = a * cft.central_transform_values(f, mu, x) + b * cft.central_transform_values(g, mu, x)
    assert np.allclose(lhs, rhs, atol=1e-10)


def test_sampled_transform_matches_closed_form():
    f = cft.AnalyticFn.gaussian(1.0, 0.8, z0=(0.2, 0.0, -0.1))
    n, L = 32, 6.0
    ax = -L + (2 * L / n) * np.arange(n)
    Z = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1)
    mu = np.array([0.5, -0.3, 0.9])
    x = np.zeros(3)
    vals = f(np.broadcast_to(x, Z.shape), Z)
    assert abs(cft.central_transform_sampled(vals, L, mu) - cft.central_transform(f, mu)(x)) < 1e-10


def test_spherical_inversion_round_trip():
    quad = QuadratureSpec(n_theta=32, n_phi=64)
    f = analytic_corpus(0, 1)[0]
    p = GroupPoint([0.2, -0.1, 0.3], [0.1, 0.4, -0.2])
    assert abs(cft.invert_analytic(f, p, quad) - f.at(p)) < 1e-6


def test_rotation_round_trip():
    f = analytic_corpus(1, 1)[0]
    frame = adapted_frame(Direction.normalized([1.0, -2.0, 0.5]))
    s = cft.central_transform(f, np.array([0.3, 0.1, -0.6]))
    x = np.array([[0.2, 0.4, -0.3]])
    assert np.allclose(cft.from_rotated(cft.rotate_slice(s, frame), frame, x), s(x), atol=1e-12)


def test_fiber_fourier_grid_matches_closed_form():
    g = cft.rotate_slice(cft.central_transform(cft.AnalyticFn.gaussian(0.7, 1.0), np.array([0, 0, 1.0])),
                         adapted_frame(Direction.normalized([0, 0, 1.0])))
    grid = cft.fiber_fourier(g, 0.4, n=64, half_width=8.0)
    S, T = grid.mesh()
    closed = cft.fiber_fourier_closed(g, 0.4)(np.stack([S, T], -1))
    assert np.max(np.abs(grid.samples - closed)) < 1e-10


def test_radial_detection():
    assert cft.AnalyticFn.gaussian().is_radial()
    assert not cft.AnalyticFn.gaussian(x0=(0.1, 0, 0)).is_radial()
    assert not cft.AnalyticFn.gaussian(poly={(1, 0, 0): 1.0}).is_radial()
