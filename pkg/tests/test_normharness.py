from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil import normharness as nh
from freenil.centralft import AnalyticFn
from freenil.polygauss import PolyGauss
from freenil.quadrature import QuadratureSpec

exps = st.sampled_from([1.0, 1.2, 4 / 3, 2.0])
FAST = nh.TensorBox(Lx=5, Lz=5, nx=11, nz=11)


def _fn(a, b):
    return lambda x, z: np.exp(-a * np.sum(x * x, -1) - b * np.sum(z * z, -1))


def test_gaussian_mixed_norm_closed_form():
    # inner: (pi/(s b))^{3/(2s)} e^{-a|x|^2}; outer: times (pi/(p a))^{3/(2p)}
    a, b, s, p = 1.0, 2.0, 1.2, 2.0
    want = (np.pi / (s * b)) ** (1.5 / s) * (np.pi / (p * a)) ** (1.5 / p)
    got = nh.mixed_norm(AnalyticFn.gaussian(a, b), s, p)
    assert got == pytest.approx(want, rel=1e-6)


@given(st.floats(-3, 3).filter(lambda c: abs(c) > 1e-2), exps, exps)
def test_mixed_norm_homogeneous(c, s, p):
    f = _fn(1.0, 1.5)
    a = nh.mixed_norm(lambda x, z: c * f(x, z), s, p, FAST)
    assert a == pytest.approx(abs(c) * nh.mixed_norm(f, s, p, FAST), rel=1e-12)


@given(exps, exps)
def test_mixed_norm_triangle_inequality(s, p):
    f, g = _fn(1.0, 1.5), (lambda x, z: np.sin(x[..., 0]) * _fn(1.2, 2.0)(x, z))
    lhs = nh.mixed_norm(lambda x, z: f(x, z) + g(x, z), s, p, FAST)
    assert lhs <= nh.mixed_norm(f, s, p, FAST) + nh.mixed_norm(g, s, p, FAST) + 1e-12


def test_tail_check_rejects_wide_functions():
    with pytest.raises(ValueError):
        nh.mixed_norm(_fn(0.01, 1.0), 1.2, 2.0, FAST)


def test_radial_rule_matches_tensor_rule():
    f = AnalyticFn.gaussian(1.0, 1.5)
    assert nh.analytic_mixed_norm(f, 1.2, 2.0) == pytest.approx(
        nh.mixed_norm(f, 1.2, 2.0), rel=1e-6)


def test_params_validation_and_bands():
    assert nh.MixedNormParams(Fraction(6, 5), 2).band == "theorem"
    assert nh.MixedNormParams(Fraction(4, 3), 2).band == "experimental"
    assert nh.MixedNormParams(Fraction(3, 2), 2, strict=False).band == "out-of-range"
    with pytest.raises(ValueError):
        nh.MixedNormParams(Fraction(3, 2), 2)
    with pytest.raises(ValueError):
        nh.MixedNormParams(1, 3)


def test_exponents_at_reference_pairs():
    mp = nh.MixedNormParams(Fraction(6, 5), Fraction(2))
    assert nh.dilation_exponent(mp) == pytest.approx(1.0)
    assert nh.printed_exponent(mp) == pytest.approx(2.0)


@given(st.fractions(1, Fraction(6, 5)))
def test_series_exponent_constant_at_six_fifths(p):
    assert nh.series_exponent(Fraction(6, 5), p) == Fraction(-5, 2)


@given(st.fractions(1, Fraction(6, 5)), st.fractions(Fraction(6, 5), 2))
def test_series_exponent_bounded(s, p):
    assert nh.series_exponent(s, p) <= Fraction(-3, 2)


def test_tomas_stein_ratio_matches_closed_form():
    c, r, s = 0.5, 1.5, 1.2
    eta = PolyGauss.gaussian(c * np.eye(3))
    # |eta^(xi)| = (pi/c)^{3/2} e^{-|xi|^2/4c}, constant on the sphere
    fhat = (np.pi / c) ** 1.5 * np.exp(-r * r / (4 * c))
    norm = (np.pi / (s * c)) ** (1.5 / s)
    want = r ** (3 * (1 - 1 / s)) * np.sqrt(4 * np.pi) * fhat / norm
    assert nh.tomas_stein_ratio(eta, r, s, eta_norm=norm) == pytest.approx(want, rel=1e-10)


def test_tomas_stein_family_scale_invariant():
    for s in (1.0, 1.2, 4 / 3):
        C = nh.tomas_stein_family_max(1.0, s)
        for r in (0.5, 2.0, 8.0):
            assert nh.tomas_stein_family_max(r, s) <= C * (1 + 1e-3)


def test_mu_fit_needs_enough_points():
    mp = nh.MixedNormParams(Fraction(6, 5), 2)
    with pytest.raises(ValueError):
        nh.mu_exponent_fit(AnalyticFn.gaussian(), mp, [1, 4, 16], QuadratureSpec())
    with pytest.raises(ValueError):
        nh.mu_exponent_fit(AnalyticFn.gaussian(), mp, [1, 1.5, 2, 3], QuadratureSpec())


def test_restriction_slope_follows_dilation():
    mp = nh.MixedNormParams(Fraction(6, 5), Fraction(2))
    fit = nh.mu_exponent_fit(AnalyticFn.gaussian(), mp, [0.25, 1, 4, 16], QuadratureSpec(n_theta=32))
    assert fit.matches_dilation and fit.power_law
    assert len(fit.ratios) == 4
