import numpy as np
import pytest

from freenil import oracle as orc
from freenil import twisted as tw
from freenil.corpus import twisted_corpus

N = 32


@pytest.fixture(scope="module")
def M():
    return orc.discretize_twisted(1.0, N, orc.oracle_box(1.0, N))


def test_blocks_hermitian_and_match_dense(M):
    assert M.hermitian_defect() < 1e-10
    D = M.dense()
    assert np.allclose(D, D.conj().T, atol=1e-10)
    w = np.sort(np.linalg.eigvalsh(D))
    assert np.allclose(w, np.sort(M.eigenvalues()), atol=1e-8)


def test_block_round_trip(M, rng):
    v = rng.normal(size=(N, N)) + 1j * rng.normal(size=(N, N))
    assert np.allclose(M.from_blocks(M.to_blocks(v)), v, atol=1e-12)


def test_low_clusters_at_landau_levels(M):
    for k, (val, deg, _) in enumerate(orc.clusters(M, 3)):
        assert deg >= orc.MIN_DEGENERACY
        assert abs(val / (2 * k + 1) - 1) < 1e-3


def test_projection_agrees_with_kernel(M):
    for i, g in enumerate(twisted_corpus(1.0, N, M.half_width, seed=2, size=3, offset=0.5)):
        assert orc.compare_lambda_projection(1.0, i % 2, g, M) < 5e-5


def test_refuses_unreliable_levels_and_node_grids(M):
    g = twisted_corpus(1.0, N, M.half_width, seed=2, size=1, offset=0.5)[0]
    with pytest.raises(ValueError):
        orc.compare_lambda_projection(1.0, orc.reliable_levels(M), g, M)
    node = tw.GridFn2D(g.samples, g.half_width, 0.0)
    with pytest.raises(ValueError):
        orc.compare_lambda_projection(1.0, 0, node, M)


def test_dump_round_trip(M, tmp_path):
    p = tmp_path / "m.bin"
    M.dump(p)
    D, meta = orc.load_dump(p)
    assert np.array_equal(D, M.dense())
    assert meta == {"version": 1, "lam": 1.0, "half_width": M.half_width}
    raw = p.read_bytes()
    p.write_bytes(raw[:-16])
    with pytest.raises(ValueError):
        orc.load_dump(p)


def test_fiber_matrix_budget():
    F = orc.discretize_fiber(1.0, [0, 0, 1.0], 12, 6.0)
    assert F.hermitian_defect() < 1e-10
    with pytest.raises(ValueError):
        orc.discretize_fiber(1.0, [0, 0, 1.0], 17, 6.0)
