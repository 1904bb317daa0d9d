import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from freenil.landau import project_polygauss_2d, psi, psi_jet, radial_index


@given(st.integers(0, 6), st.integers(-6, 6), st.floats(0.3, 3.0))
def test_landau_functions_are_eigenfunctions(k, ell, lam):
    s, t = np.array([0.3, -0.8, 1.1]), np.array([0.5, 0.2, -0.4])
    f, fs, ft, fss, fst, ftt = psi_jet(k, ell, lam, s, t)
    Hf = -(fss + ftt) - 1j * lam * (t * fs - s * ft) + lam**2 / 4 * (s * s + t * t) * f
    assert np.allclose(Hf, lam * (2 * k + 1) * f, atol=1e-9 * max(1.0, np.max(np.abs(f))))


def test_absent_sectors_vanish():
    assert radial_index(0, 3) < 0 or radial_index(0, -3) < 0
    k = 0
    ell = 3 if radial_index(k, 3) < 0 else -3
    assert np.all(psi(k, ell, 1.0, np.array([0.5]), np.array([0.2])) == 0)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_ground_gaussian_lives_in_level_zero(lam):
    p = {(0, 0): 1.0}
    c0 = project_polygauss_2d(p, lam / 4, lam, 0)
    assert c0[0] == pytest.approx(1.0, abs=1e-12)
    for k in (1, 2, 5):
        assert all(abs(v) < 1e-12 for v in project_polygauss_2d(p, lam / 4, lam, k).values())
