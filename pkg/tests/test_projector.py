import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freenil import centralft as cft
from freenil import projector as pj
from freenil.corpus import centred_corpus, gaussian_tensor_corpus
from freenil.nilgeom import Direction, GroupPoint
from freenil.quadrature import QuadratureSpec

SPEC = QuadratureSpec()
PTS = pj.default_points(4, seed=3)
G = gaussian_tensor_corpus()[0]


def test_empty_inputs_give_empty_slices():
    s = pj.project_mu(G, 1.0, SPEC, [])
    assert s.values.shape == (0,)
    assert s.to_csv() == "mu,point,x1,x2,x3,z1,z2,z3,re,im\r\n"
    z = pj.project_mu(cft.AnalyticFn.zero(), 1.0, SPEC, PTS)
    assert np.all(z.values == 0)


def test_rejects_x_shifted_terms_and_bad_mu():
    with pytest.raises(pj.Unsupported):
        pj.project_mu(cft.AnalyticFn.gaussian(x0=(0.5, 0, 0)), 1.0, SPEC, PTS)
    with pytest.raises(ValueError):
        pj.project_mu(G, 0.0, SPEC, PTS)


def test_coarse_spec_is_reported():
    with pytest.raises(pj.SpecInsufficient) as e:
        pj.project_mu(G, 4.0, QuadratureSpec(n_theta=2, n_phi=4), [GroupPoint([2, 0, 0], [3, 0, 0])])
    assert e.value.component == "sphere"


@pytest.mark.parametrize("f", gaussian_tensor_corpus()[:2] + centred_corpus(0, 2)[1:])
def test_spectral_density_is_eigenfunction(f):
    r = pj.eigen_residual(f, 1.0, SPEC, PTS)
    assert not r.indeterminate
    assert r.residual < 1e-3


def test_linearity_and_gauge_invariance():
    g = centred_corpus(0, 2)[1]
    a = pj.project_mu(g, 2.0, SPEC, PTS, check=False).values
    b = pj.project_mu(g, 2.0, QuadratureSpec(gauge=1.1), PTS, check=False).values
    assert np.linalg.norm(a - b) <= 1e-8 * np.linalg.norm(a)
    c = pj.project_mu(G * 2j + g, 2.0, SPEC, PTS, check=False).values
    d = 2j * pj.project_mu(G, 2.0, SPEC, PTS, check=False).values + a
    assert np.linalg.norm(c - d) <= 1e-12 * np.linalg.norm(d)


@settings(max_examples=4)
@given(st.sampled_from([0.5, 2.0]), st.sampled_from([1.0, 4.0]))
def test_dilation_covariance(eps, mu):
    assert pj.dilation_covariance_residual(G, mu, eps, SPEC, PTS) < 1e-6


def test_worker_count_does_not_change_bits():
    a = pj.project_mu(G, 1.0, SPEC, PTS, workers=1).values
    b = pj.project_mu(G, 1.0, SPEC, PTS, workers=2).values
    assert a.tobytes() == b.tobytes()


def test_fiber_terms_sum_to_central_transform():
    f = centred_corpus(1, 2)[1]
    om = Direction.normalized([0.3, -0.5, 0.8])
    p = GroupPoint([0.2, -0.4, 0.1], [0, 0, 0])
    terms = pj.fiber_decompose(f, 1.3, om, 60, p)
    want = cft.central_transform(f, 1.3 * om.omega)(p.x)
    assert abs(terms.sum() - want) < 1e-8 * max(abs(want), 1e-3)


def test_radial_path_matches_general_path():
    x = np.array([0.0, 0.0, 0.6])
    z = np.array([0.8 * np.sqrt(1 - 0.3**2), 0.0, 0.8 * 0.3])
    general = pj.project_mu(G, 1.5, QuadratureSpec(n_theta=24, n_phi=48), [GroupPoint(x, z)], check=False).values[0]
    radial = pj.project_mu_radial(G, 1.5, QuadratureSpec(n_theta=24), np.array([0.6]), np.array([0.8]), np.array([0.3]))
    assert abs(np.ravel(radial)[0] - general) < 1e-10


def test_reconstruction_small():
    spec = pj.default_spec(G, 24)
    rec = pj.reconstruct(G, spec, PTS[:2])
    exact = np.array([G.at(p) for p in PTS[:2]])
    assert np.linalg.norm(rec - exact) < 1e-2 * np.linalg.norm(exact)


def test_csv_is_crlf_and_sidecar_is_json():
    import json

    s = pj.project_mu(G, 1.0, SPEC, PTS[:2])
    lines = s.to_csv().split("\r\n")
    assert lines[0].startswith("mu,point") and len(lines) == 4 and lines[-1] == ""
    assert json.loads(s.sidecar())["n_points"] == 2
