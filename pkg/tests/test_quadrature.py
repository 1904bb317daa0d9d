import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil.quadrature import QuadratureSpec, gauss_legendre, sphere_rule


@given(st.integers(1, 40), st.integers(1, 80))
def test_sphere_weights_sum_to_area(nt, nphi):
    nodes, w = sphere_rule(nt, nphi)
    assert np.sum(w) == pytest.approx(4 * np.pi, rel=1e-12)
    assert np.allclose(np.linalg.norm(nodes, axis=1), 1)


def test_sphere_rule_integrates_polynomials():
    nodes, w = sphere_rule(8, 16)
    assert np.sum(w * nodes[:, 2] ** 2) == pytest.approx(4 * np.pi / 3, rel=1e-12)
    assert abs(np.sum(w * nodes[:, 0] * nodes[:, 1])) < 1e-12


@given(st.floats(-5, 5), st.floats(0.1, 5))
def test_gauss_legendre_exact_for_cubics(lo, width):
    x, w = gauss_legendre(2, lo, lo + width)
    hi = lo + width
    assert np.sum(w * x**3) == pytest.approx((hi**4 - lo**4) / 4, rel=1e-10, abs=1e-10)


@given(st.integers(1, 64), st.integers(2, 64), st.integers(0, 64), st.floats(-3, 3))
def test_spec_round_trips_through_dict(nt, nphi, kmax, gauge):
    spec = QuadratureSpec(n_theta=nt, n_phi=nphi, k_max=kmax, gauge=gauge)
    assert QuadratureSpec.from_dict(spec.to_dict()) == spec


def test_spec_with_mu_range():
    spec = QuadratureSpec.with_mu_range(0.0, 10.0, n_mu=12)
    assert len(spec.mu_nodes) == 12
    assert sum(spec.mu_weights) == pytest.approx(10.0)
    assert QuadratureSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("kw", [{"n_theta": 0}, {"k_max": -1}, {"mu_nodes": (1.0,), "mu_weights": ()},
                                {"mu_nodes": (-1.0,), "mu_weights": (1.0,)}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        QuadratureSpec(**kw)


def test_from_dict_rejects_unknown():
    with pytest.raises(ValueError):
        QuadratureSpec.from_dict({"n_theta": 4, "bogus": 1})
