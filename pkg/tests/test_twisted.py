from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil import twisted as tw

LAM = 1.0
N = 64


def gauss(lam=LAM, shift=(0.4, -0.3), c=0.3):
    L = tw.box_half_width(lam)
    return tw.GridFn2D.from_function(
        lambda s, t: (1 + 0.5 * s - 0.2j * t * t) * np.exp(-c * lam * ((s - shift[0]) ** 2 + (t - shift[1]) ** 2)), N, L)


@pytest.mark.parametrize("k", [0, 1, 4])
def test_projection_is_eigenfunction(k):
    g = gauss()
    pk = tw.lambda_project(g, tw.TwistParams(LAM, k))
    assert tw.eigen_residual(pk, tw.TwistParams(LAM, k)) < 1e-6


def test_projections_idempotent_and_orthogonal():
    g = gauss()
    p2 = tw.lambda_project(g, tw.TwistParams(LAM, 2))
    assert (tw.lambda_project(p2, tw.TwistParams(LAM, 2)) - p2).norm() < 1e-8 * g.norm()
    assert tw.lambda_project(p2, tw.TwistParams(LAM, 3)).norm() < 1e-8 * g.norm()


def test_fast_and_direct_convolution_agree():
    g = gauss()
    tp = tw.TwistParams(LAM, 1)
    a = tw.lambda_project(g, tp, method="fast")
    b = tw.lambda_project(g, tp, method="direct")
    assert (a - b).norm() < 1e-10 * g.norm()


def test_partial_sums_complete():
    g = tw.GridFn2D.from_function(lambda s, t: np.exp(-0.3 * ((s - 0.4) ** 2 + t * t)) * (1 + s),
                                  128, tw.box_half_width(LAM))
    K = tw.truncation_order(LAM, tw.effective_radius(g))
    with pytest.raises(ValueError):
        tw.partial_sum(gauss(), LAM, K)
    assert (tw.partial_sum(g, LAM, K) - g).norm() < 1e-6 * g.norm()
    assert (tw.partial_sum(g, LAM, 0) - g).norm() > 1e-2 * g.norm()


@given(st.floats(0.3, 3.0))
def test_ground_state_fixed(lam):
    L = tw.box_half_width(lam)
    g0 = tw.GridFn2D.from_function(lambda s, t: np.exp(-lam * (s * s + t * t) / 4), N, L)
    assert (tw.lambda_project(g0, tw.TwistParams(lam, 0)) - g0).norm() < 1e-8 * g0.norm()


def test_projection_is_contraction():
    g = gauss()
    for k in range(6):
        assert tw.lambda_project(g, tw.TwistParams(LAM, k)).norm() <= g.norm() * (1 + 1e-12)


def test_gamma_exact_values():
    assert tw.gamma_exponent(Fraction(1)) == 0
    assert tw.gamma_exponent(Fraction(6, 5)) == Fraction(-1, 6)
    assert tw.gamma_exponent(Fraction(2)) == 0


@given(st.fractions(1, 2))
def test_gamma_continuous_at_breakpoint_side(p):
    g = tw.gamma_exponent(p)
    assert -Fraction(1, 6) <= g <= 0


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        tw.TwistParams(0.0, 1)
    with pytest.raises(ValueError):
        tw.TwistParams(1.0, -1)
    with pytest.raises(ValueError):
        tw.GridFn2D(np.zeros((48, 48)), 1.0)
    with pytest.raises(ValueError):
        tw.gamma_exponent(3)


def test_loglog_slope_recovers_power():
    x = np.array([1, 2, 4, 8.0])
    s, r = tw.loglog_slope(x, 3 * x**1.5)
    assert s == pytest.approx(1.5) and r < 1e-12


def test_kr_ratios_do_not_grow_with_level():
    fam = tw.kr_family(LAM, N)
    ks = list(range(6))
    for p, r in tw.kr_sweep(LAM, [1.0, 2.0], ks, fam).items():
        assert tw.loglog_slope([2 * k + 1 for k in ks], r)[0] <= 0.15
