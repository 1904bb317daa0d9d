"""Brute-force matrix discretizations used as an independent check.

The twisted Laplacian is discretized on a cell-centred periodic grid, where the
quarter turn ``(s, t) -> (-t, s)`` permutes grid points without fixed points.
The operator commutes with it, so the matrix splits into four blocks (one per
fourth root of unity) of size n^2/4, each diagonalized densely.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .twisted import GridFn2D, TwistParams, lambda_project

DENSE_BUDGET = 4096
CLUSTER_FRAC = 0.05
ROOTS = (1.0, 1j, -1.0, -1j)
MIN_DEGENERACY = 4


def _derivative_matrices(n: int, h: float, method: str):
    if method == "spectral":
        freq = 2 * np.pi * np.fft.fftfreq(n, d=h)
        f1 = freq.copy()
        f1[n // 2] = 0.0
        eye = np.eye(n)
        D1 = np.real(np.fft.ifft(1j * f1[:, None] * np.fft.fft(eye, axis=0), axis=0))
        D2 = np.real(np.fft.ifft(-(freq**2)[:, None] * np.fft.fft(eye, axis=0), axis=0))
        return 0.5 * (D1 - D1.T), 0.5 * (D2 + D2.T)
    if method == "fd4":
        D1 = np.zeros((n, n))
        D2 = np.zeros((n, n))
        c1 = {1: 2 / 3, 2: -1 / 12}
        c2 = {0: -5 / 2, 1: 4 / 3, 2: -1 / 12}
        for i in range(n):
            for d, c in c1.items():
                D1[i, (i + d) % n] += c / h
                D1[i, (i - d) % n] -= c / h
            D2[i, i] += c2[0] / h**2
            for d in (1, 2):
                D2[i, (i + d) % n] += c2[d] / h**2
                D2[i, (i - d) % n] += c2[d] / h**2
        return D1, D2
    raise ValueError(f"unknown method {method!r}")


@dataclass
class OperatorMatrix:
    """Delta^lam on an n x n cell-centred grid, stored as four symmetry blocks."""

    lam: float
    n: int
    half_width: float
    method: str
    blocks: list = field(repr=False)
    _eig: list | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.n * self.n

    @property
    def axis(self) -> np.ndarray:
        h = 2 * self.half_width / self.n
        return -self.half_width + (np.arange(self.n) + 0.5) * h

    def hermitian_defect(self) -> float:
        return max(float(np.max(np.abs(B - B.conj().T))) for B in self.blocks)

    def eig(self):
        if self._eig is None:
            self._eig = [np.linalg.eigh(B) for B in self.blocks]
        return self._eig

    def eigenvalues(self) -> np.ndarray:
        return np.sort(np.concatenate([w for w, _ in self.eig()]))

    # symmetry-adapted coordinates
    def _orbits(self):
        n = self.n
        h = n // 2
        i, j = np.meshgrid(np.arange(h, n), np.arange(h, n), indexing="ij")
        i, j = i.ravel(), j.ravel()
        orb = [(i, j)]
        for _ in range(3):
            i, j = n - 1 - j, i
            orb.append((i, j))
        return orb

    def to_blocks(self, v: np.ndarray) -> list:
        v = np.asarray(v).reshape(self.n, self.n)
        orb = self._orbits()
        return [0.5 * sum(np.conj(c**q) * v[orb[q]] for q in range(4)) for c in ROOTS]

    def from_blocks(self, ys: list) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        orb = self._orbits()
        for c, y in zip(ROOTS, ys):
            for q in range(4):
                out[orb[q]] += 0.5 * c**q * y
        return out

    def dense(self) -> np.ndarray:
        """Full matrix in row-major grid order (for dumps and small checks)."""
        if self.dimension > DENSE_BUDGET:
            raise ValueError("dense budget exceeded")
        N = self.dimension
        out = np.empty((N, N), dtype=complex)
        for col in range(N):
            e = np.zeros(N)
            e[col] = 1.0
            ys = self.to_blocks(e)
            out[:, col] = self.from_blocks([B @ y for B, y in zip(self.blocks, ys)]).ravel()
        return out

    def dump(self, path) -> None:
        """Binary layout: magic b'FNOM', uint32 version, uint64 rows, uint64 cols,
        float64 lam, float64 half_width, then rows*cols (re, im) float64 pairs, row-major, little-endian."""
        M = self.dense()
        with open(path, "wb") as fh:
            fh.write(b"FNOM")
            fh.write(struct.pack("<IQQdd", 1, M.shape[0], M.shape[1], self.lam, self.half_width))
            fh.write(np.ascontiguousarray(M, dtype="<c16").tobytes())


def load_dump(path) -> tuple[np.ndarray, dict]:
    with open(path, "rb") as fh:
        if fh.read(4) != b"FNOM":
            raise ValueError("not a matrix dump")
        version, rows, cols, lam, hw = struct.unpack("<IQQdd", fh.read(4 + 8 + 8 + 8 + 8))
        data = np.frombuffer(fh.read(), dtype="<c16")
    if data.size != rows * cols:
        raise ValueError("truncated matrix dump")
    return data.reshape(rows, cols), {"version": version, "lam": lam, "half_width": hw}


def discretize_twisted(lam: float, n: int, L: float, method: str = "spectral") -> OperatorMatrix:
    """-d_ss - d_tt - i lam (t d_s - s d_t) + lam^2/4 (s^2 + t^2) on [-L, L]^2, n cells per axis."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    if n * n > DENSE_BUDGET:
        raise ValueError(f"dense budget exceeded: n^2 = {n * n} > {DENSE_BUDGET}")
    if n % 2 or n < 4:
        raise ValueError("n must be even and at least 4")
    h = 2 * L / n
    ax = -L + (np.arange(n) + 0.5) * h
    D1, D2 = _derivative_matrices(n, h, method)
    half = n // 2
    ri, rj = np.meshgrid(np.arange(half, n), np.arange(half, n), indexing="ij")
    ri, rj = ri.ravel(), rj.ravel()
    m = len(ri)
    # rows of the full matrix at the representative points, shape (m, n, n)
    rows = np.zeros((m, n, n), dtype=complex)
    idx = np.arange(m)
    rows[idx, :, rj] += -D2[ri, :] - 1j * lam * ax[rj][:, None] * D1[ri, :]
    rows[idx, ri, :] += -D2[rj, :] + 1j * lam * ax[ri][:, None] * D1[rj, :]
    rows[idx, ri, rj] += lam**2 / 4 * (ax[ri] ** 2 + ax[rj] ** 2)
    # columns at the rotated copies of the representatives
    orb = [(ri, rj)]
    a, b = ri, rj
    for _ in range(3):
        a, b = n - 1 - b, a
        orb.append((a, b))
    blocks = []
    for c in ROOTS:
        B = sum(c**q * rows[:, orb[q][0], orb[q][1]] for q in range(4))
        blocks.append(0.5 * (B + B.conj().T))
    return OperatorMatrix(lam, n, L, method, blocks)


def _degenerate_group(w: np.ndarray, target: float, window: float, tight: float):
    """Largest group of eigenvalues in the window that agree to within ``tight``."""
    sel = np.sort(w[np.abs(w - target) <= window])
    if sel.size == 0:
        return np.array([])
    best = sel[:1]
    start = 0
    for i in range(1, sel.size + 1):
        if i == sel.size or sel[i] - sel[i - 1] > tight:
            if i - start > best.size:
                best = sel[start:i]
            start = i
    return best


def clusters(M: OperatorMatrix, count: int, frac: float = CLUSTER_FRAC) -> list[tuple[float, int, int]]:
    """Per level k < count: (value, degeneracy, window count).

    The window holds every eigenvalue within frac*lam of lam(2k+1).  Box-edge
    states spread through it; the value is the mean of the largest group of
    eigenvalues agreeing to 1e-8 lam (the discrete Landau degeneracy).
    """
    w = M.eigenvalues()
    out = []
    for k in range(count):
        target = M.lam * (2 * k + 1)
        grp = _degenerate_group(w, target, frac * M.lam, 1e-8 * M.lam)
        win = int(np.sum(np.abs(w - target) <= frac * M.lam))
        out.append((float(grp.mean()) if grp.size else float("nan"), int(grp.size), win))
    return out


def eig_project(M: OperatorMatrix, target: float, tol: float, v) -> tuple[np.ndarray, int]:
    """Projection of v onto eigenvectors with eigenvalue within tol of target; returns (vector, group size)."""
    ys = M.to_blocks(v)
    out = []
    size = 0
    for (w, U), y in zip(M.eig(), ys):
        sel = np.abs(w - target) <= tol
        size += int(sel.sum())
        Us = U[:, sel]
        out.append(Us @ (Us.conj().T @ y))
    return M.from_blocks(out), size


def reliable_levels(M: OperatorMatrix, min_count: int = MIN_DEGENERACY, rel_tol: float = 1e-3) -> int:
    """Leading levels with at least ``min_count`` eigenvalues within rel_tol of lam(2k+1)."""
    w = M.eigenvalues()
    k = 0
    while np.sum(np.abs(w - M.lam * (2 * k + 1)) <= rel_tol * M.lam * (2 * k + 1)) >= min_count:
        k += 1
    return k


def oracle_box(lam: float, n: int) -> float:
    """Box half-width: wide enough for the Gaussian tails, fine enough for the grid."""
    return min(14.0, n / 4) / np.sqrt(lam)


def compare_lambda_projection(lam: float, k: int, g: GridFn2D, M: OperatorMatrix | None = None,
                              method: str = "spectral") -> float:
    """||eig_project(Delta^lam, lam(2k+1)) g - Lambda_k g|| / ||g|| on g's grid."""
    if g.offset != 0.5:
        raise ValueError("the oracle uses cell-centred grids")
    if M is None:
        M = discretize_twisted(lam, g.n, g.half_width, method)
    if M.n != g.n or M.half_width != g.half_width:
        raise ValueError("grid mismatch between matrix and function")
    if k >= reliable_levels(M):
        raise ValueError(f"level k = {k} lies beyond the reliable part of the discrete spectrum")
    target = lam * (2 * k + 1)
    pv, size = eig_project(M, target, CLUSTER_FRAC * lam, g.samples)
    if size == 0:
        raise ValueError("empty eigengroup")
    ref = lambda_project(g, TwistParams(lam, k)).samples
    nrm = np.linalg.norm(g.samples)
    return float(np.linalg.norm(pv - ref) / nrm) if nrm else 0.0


@dataclass
class FiberMatrix:
    """Dense L^{rho omega} on an n^3 node grid (C order)."""

    matrix: np.ndarray = field(repr=False)
    n: int
    half_width: float

    @property
    def dimension(self) -> int:
        return self.n**3

    def hermitian_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))


def discretize_fiber(rho: float, omega, n: int, L: float) -> FiberMatrix:
    """Dense copy of the periodic 4th-order fiber sub-Laplacian; n^3 within the dense budget."""
    from .fieldops import FiberParams, fiber_sublaplacian_matrix
    from .nilgeom import Direction

    if n**3 > DENSE_BUDGET:
        raise ValueError(f"dense budget exceeded: n^3 = {n**3} > {DENSE_BUDGET}")
    om = omega if isinstance(omega, Direction) else Direction.normalized(omega)
    M = fiber_sublaplacian_matrix(FiberParams(rho, om), n, L).toarray()
    return FiberMatrix(M, n, L)
