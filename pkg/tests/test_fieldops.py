import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil import fieldops as fo
from freenil.corpus import analytic_corpus, random_points
from freenil.nilgeom import Direction, GroupPoint
from freenil.polygauss import PolyGauss

CORPUS = analytic_corpus(3, 2)
PTS = random_points(5, 6)
U = np.array([p.as_array() for p in PTS])
direction = st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(lambda v: np.linalg.norm(v) > 0.1)


@pytest.mark.parametrize("f", CORPUS)
def test_expanded_operator_matches_sum_of_squares(f):
    F = f.to_polygauss()
    a, b = fo.sublaplacian_expanded(F)(U), fo.sublaplacian_composed(F)(U)
    assert np.max(np.abs(a - b)) <= 1e-8 * max(1.0, np.max(np.abs(b)))


def test_vector_field_agrees_with_finite_difference():
    F = CORPUS[0].to_polygauss()
    p = PTS[0]
    exact = fo.vector_field(1, F)(p.as_array())
    assert abs(fo.apply_vector_field(1, F, p) - exact) < 1e-6


@given(st.sampled_from([0.5, 2.0, 3.0]))
def test_homogeneity(eps):
    F = CORPUS[1].to_polygauss()
    p = GroupPoint(PTS[1].x / eps, PTS[1].z / eps**2)
    scale = max(abs(eps**2 * fo.sublaplacian_expanded(F)(p.as_array())), 1e-3)
    assert fo.homogeneity_residual(F, eps, p) <= 1e-8 * scale


@given(st.floats(0.2, 3.0), direction)
def test_intertwining_and_conjugation(rho, w):
    fp = fo.FiberParams(rho, Direction.normalized(w))
    g = PolyGauss.gaussian(np.diag([1.0, 0.6, 0.9]), u0=[0.1, 0.0, -0.2], poly={(0, 0, 0): 1.0, (1, 1, 0): 0.3})
    ref = max(1.0, np.max(np.abs(fo.fiber_sublaplacian(fp, g)(U[:, :3]))))
    assert fo.intertwining_residual(fp, g, PTS[2]) <= 1e-8 * ref
    assert fo.conjugation_residual(fp, g, U[:, :3]) <= 1e-8 * ref


def test_fiber_params_reject_nonpositive_rho():
    with pytest.raises(ValueError):
        fo.FiberParams(0.0, Direction.normalized([0, 0, 1]))


def test_grid_fiber_operator_converges_at_fourth_order():
    fp = fo.FiberParams(1.0, Direction.normalized([1.0, 2.0, 2.0]))
    g = PolyGauss.gaussian(np.eye(3) * 0.5)
    L = 7.0
    errs = []
    for n in (16, 32):
        ax = -L + (2 * L / n) * np.arange(n)
        X = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1)
        got = (fo.fiber_sublaplacian_matrix(fp, n, L) @ g(X).ravel()).reshape(n, n, n)
        want = fo.fiber_sublaplacian(fp, g)(X)
        errs.append(np.max(np.abs(got - want)) / np.max(np.abs(want)))
    assert errs[1] < 1e-2
    assert np.log2(errs[0] / errs[1]) > 3.0
