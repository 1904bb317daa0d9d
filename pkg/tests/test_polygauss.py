import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import dblquad

from freenil.polygauss import (PolyGauss, conj, fourier_last, integrate, multiply, poly_degree, poly_diff,
                               poly_mul, recenter, tensor)

coef = st.floats(-2, 2, allow_nan=False)


def gauss2(a=1.0, b=0.7, shift=(0.3, -0.2), poly=None):
    return PolyGauss.gaussian(np.diag([a, b]), u0=shift, poly=poly or {(0, 0): 1.0, (1, 0): 0.5, (0, 2): -0.25})


def test_derivative_matches_finite_difference():
    f = gauss2()
    u = np.array([0.4, -0.1])
    h = 1e-6
    fd = (f(u + [h, 0]) - f(u - [h, 0])) / (2 * h)
    assert abs(f.diff(0)(u) - fd) < 1e-8


@given(coef, coef)
def test_linear_combination_evaluates_pointwise(a, b):
    f, g = gauss2(), gauss2(0.5, 2.0, (0.0, 0.0))
    u = np.array([[0.1, 0.2], [-1.0, 0.5]])
    assert np.allclose((a * f + b * g)(u), a * f(u) + b * g(u), atol=1e-12)


def test_integrate_matches_scipy():
    f = gauss2()
    ref = dblquad(lambda y, x: f(np.array([x, y])).real, -10, 10, -10, 10, epsabs=1e-13)[0]
    assert integrate(f) == pytest.approx(ref, rel=1e-10)


@given(st.floats(-3, 3))
def test_fourier_last_matches_quadrature(xi):
    f = gauss2()
    v, w = np.polynomial.legendre.leggauss(200)
    v, w = 10 * v, 10 * w
    x = 0.37
    ref = np.sum(w * np.exp(-1j * xi * v) * f(np.stack([np.full_like(v, x), v], -1)))
    assert abs(fourier_last(f, xi)(np.array([x])) - ref) < 1e-10


def test_recenter_and_conj_and_product():
    f = gauss2()
    u = np.array([0.2, 0.9])
    assert abs(recenter(f)(u) - f(u)) < 1e-12
    assert abs(conj(f * (1 + 2j))(u) - np.conj((1 + 2j) * f(u))) < 1e-12
    assert abs(multiply(f, f)(u) - f(u) ** 2) < 1e-12


def test_tensor_product_separates():
    f = PolyGauss.gaussian([[1.0]])
    g = PolyGauss.gaussian([[2.0]])
    assert abs(tensor(f, g)(np.array([0.3, 0.4])) - f(np.array([0.3])) * g(np.array([0.4]))) < 1e-14


def test_polynomial_algebra():
    p = {(2, 1): 3.0}
    assert poly_degree(p) == 3
    assert poly_diff(p, 0) == {(1, 1): 6.0}
    assert poly_mul(p, {(0, 1): 2.0}) == {(2, 2): 6.0}
