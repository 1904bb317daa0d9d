"""Left-invariant vector fields, the sub-Laplacian and its fiber operators.

Functions on G are 6-variable :class:`PolyGauss` objects with variables ordered
``(x1, x2, x3, z1, z2, z3)``; functions on the first layer are 3-variable ones.
Two backends exist: exact differentiation of the closed-form family, and
fourth-order central differences for sampled or black-box inputs.

Vector fields, for ``a = 1, 2, 3``:

    X_a = d/dx_a + 1/2 (x cross e_a) . grad_z

and the fiber operators obtained by conjugating with ``exp(-i rho omega(Z))``:

    X_a^{rho omega} = d/dx_a - i/2 rho (omega cross x)_a
    L^{rho omega}  = -Lap_x + i rho (omega cross x) . grad_x + rho^2/4 |omega cross x|^2
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp

from .nilgeom import Direction, GroupPoint, adapted_frame, dilate
from .polygauss import PolyGauss

_LEVI = np.zeros((3, 3, 3))
for _i, _j, _k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
    _LEVI[_i, _j, _k] = 1.0
    _LEVI[_i, _k, _j] = -1.0


@dataclass(frozen=True)
class FiberParams:
    rho: float
    omega: Direction

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")


@dataclass(frozen=True)
class GridFn3D:
    """Samples on the periodic cube [-L, L)^3 with n points per side."""

    samples: np.ndarray
    half_width: float

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 3 or len(set(s.shape)) != 1:
            raise ValueError("GridFn3D samples must be an n x n x n array")
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / self.n

    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.n)


# ---------------------------------------------------------------- exact path


def _linear_combo_mul(f: PolyGauss, coeffs) -> PolyGauss:
    """Multiply ``f`` by the linear form ``sum_j coeffs[j] u_j``."""
    out = PolyGauss.zero(f.nvars)
    for j, c in enumerate(coeffs):
        if c != 0:
            out = out + c * f.mulvar(j)
    return out


def vector_field(a: int, f: PolyGauss) -> PolyGauss:
    """X_a f for a in {1, 2, 3}."""
    i = a - 1
    out = f.diff(i)
    # coefficient of d/dz_j is 1/2 (x cross e_a)_j = 1/2 eps_{j k a} x_k
    for j in range(3):
        for k in range(3):
            c = 0.5 * _LEVI[j, k, i]
            if c:
                out = out + c * f.diff(3 + j).mulvar(k)
    return out


def sublaplacian_composed(f: PolyGauss) -> PolyGauss:
    """-(X1^2 + X2^2 + X3^2) f."""
    out = PolyGauss.zero(6)
    for a in (1, 2, 3):
        out = out - vector_field(a, vector_field(a, f))
    return out


def sublaplacian_expanded(f: PolyGauss) -> PolyGauss:
    """-Lap_x f - (x cross grad_x).grad_z f - 1/4 (|x|^2 Lap_z - (x.grad_z)^2) f."""
    out = PolyGauss.zero(6)
    for i in range(3):
        out = out - f.diff(i).diff(i)
    # (x cross grad_x)_j = eps_{j k l} x_k d/dx_l, paired with d/dz_j
    for j in range(3):
        for k in range(3):
            for l in range(3):
                c = _LEVI[j, k, l]
                if c:
                    out = out - c * f.diff(l).diff(3 + j).mulvar(k)
    for j in range(3):
        for k in range(3):
            dzz = f.diff(3 + j).diff(3 + k)
            if j == k:
                for m in range(3):
                    out = out - 0.25 * dzz.mulvar(m).mulvar(m)
            out = out + 0.25 * dzz.mulvar(j).mulvar(k)
    return out


def apply_vector_field(a: int, f, p: GroupPoint, h: float | None = None) -> complex:
    """(X_a f)(p); exact for :class:`PolyGauss`, finite differences for callables."""
    if isinstance(f, PolyGauss):
        return complex(vector_field(a, f)(p.as_array()))
    return complex(_fd_vector_field(a, f, p.as_array(), h or 1e-3))


def apply_sublaplacian(f, p: GroupPoint, h: float | None = None) -> complex:
    if isinstance(f, PolyGauss):
        return complex(sublaplacian_expanded(f)(p.as_array()))
    u = p.as_array()
    h = h or 1e-2
    return complex(-sum(_fd_xa_xa(a, f, u, h) for a in (1, 2, 3)))


def fiber_field(a: int, fp: FiberParams, g: PolyGauss) -> PolyGauss:
    """X_a^{rho omega} g for a first-layer function ``g``."""
    i = a - 1
    w = fp.omega.omega
    # (omega cross x)_i = eps_{i j k} omega_j x_k
    lin = [sum(_LEVI[i, j, k] * w[j] for j in range(3)) for k in range(3)]
    return g.diff(i) + (-0.5j * fp.rho) * _linear_combo_mul(g, lin)


def fiber_sublaplacian_composed(fp: FiberParams, g: PolyGauss) -> PolyGauss:
    out = PolyGauss.zero(3)
    for a in (1, 2, 3):
        out = out - fiber_field(a, fp, fiber_field(a, fp, g))
    return out


def fiber_sublaplacian(fp: FiberParams, g: PolyGauss) -> PolyGauss:
    """L^{rho omega} g from the expanded form."""
    w = fp.omega.omega
    rho = fp.rho
    out = PolyGauss.zero(3)
    for i in range(3):
        out = out - g.diff(i).diff(i)
    for i in range(3):
        lin = [sum(_LEVI[i, j, k] * w[j] for j in range(3)) for k in range(3)]
        out = out + (1j * rho) * _linear_combo_mul(g.diff(i), lin)
    # |omega cross x|^2 = |x|^2 - (omega.x)^2
    for k in range(3):
        out = out + (rho**2 / 4) * g.mulvar(k).mulvar(k)
    wx = _linear_combo_mul(g, w)
    out = out - (rho**2 / 4) * _linear_combo_mul(wx, w)
    return out


def lift_character(fp: FiberParams, g: PolyGauss) -> PolyGauss:
    """The group function exp(-i rho omega(Z)) g(X)."""
    G = g.embed([0, 1, 2], 6)
    return G.plane_wave(np.concatenate([np.zeros(3), -fp.rho * fp.omega.omega]))


def intertwining_residual(fp: FiberParams, g: PolyGauss, p: GroupPoint) -> float:
    lhs = sublaplacian_expanded(lift_character(fp, g))(p.as_array())
    phase = np.exp(-1j * fp.rho * (fp.omega.omega @ p.z))
    rhs = phase * fiber_sublaplacian(fp, g)(p.x)
    return float(abs(lhs - rhs))


def twisted_laplacian_2d(lam: float, h: PolyGauss) -> PolyGauss:
    """-d_ss - d_tt - i lam (t d_s - s d_t) + lam^2/4 (s^2 + t^2) on 2-variable ``h``."""
    out = -h.diff(0).diff(0) - h.diff(1).diff(1)
    out = out + (-1j * lam) * (h.diff(0).mulvar(1) - h.diff(1).mulvar(0))
    out = out + (lam**2 / 4) * (h.mulvar(0).mulvar(0) + h.mulvar(1).mulvar(1))
    return out


def conjugated_fiber_operator(fp: FiberParams, h: PolyGauss) -> PolyGauss:
    """-d_v^2 + Delta^rho_{x_w, y_w} on a function of adapted coordinates (x_w, y_w, v)."""
    out = -h.diff(2).diff(2)
    out = out - h.diff(0).diff(0) - h.diff(1).diff(1)
    out = out + (-1j * fp.rho) * (h.diff(0).mulvar(1) - h.diff(1).mulvar(0))
    out = out + (fp.rho**2 / 4) * (h.mulvar(0).mulvar(0) + h.mulvar(1).mulvar(1))
    return out


def to_adapted_fn(omega: Direction, g: PolyGauss, gauge: float = 0.0) -> PolyGauss:
    """h(x_w, y_w, v) = g(R^T (x_w, y_w, v))."""
    return g.substitute(adapted_frame(omega, gauge).R.T)


def conjugation_residual(fp: FiberParams, g: PolyGauss, points) -> float:
    """max |(L^{rho w} g)(R^T y) - (conjugated operator)(g o R^T)(y)| over adapted points y."""
    R = adapted_frame(fp.omega).R
    y = np.atleast_2d(points)
    lhs = fiber_sublaplacian(fp, g)(y @ R)
    rhs = conjugated_fiber_operator(fp, to_adapted_fn(fp.omega, g))(y)
    return float(np.max(np.abs(lhs - rhs)))


def compose_dilation(f: PolyGauss, eps: float) -> PolyGauss:
    """f o delta_eps."""
    return f.substitute(np.diag([eps] * 3 + [eps**2] * 3))


def homogeneity_residual(f: PolyGauss, eps: float, p: GroupPoint) -> float:
    lhs = sublaplacian_expanded(compose_dilation(f, eps))(p.as_array())
    rhs = eps**2 * sublaplacian_expanded(f)(dilate(p, eps).as_array())
    return float(abs(lhs - rhs))


# ------------------------------------------------------ finite-difference path

_D1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_OFFSETS = np.arange(-2, 3)


def _fd_directional(f: Callable, u: np.ndarray, direction: np.ndarray, h: float) -> complex:
    return sum(c * f(u + o * h * direction) for c, o in zip(_D1, _OFFSETS)) / h


def _field_direction(a: int, u: np.ndarray) -> np.ndarray:
    i = a - 1
    d = np.zeros(6)
    d[i] = 1.0
    for j in range(3):
        for k in range(3):
            d[3 + j] += 0.5 * _LEVI[j, k, i] * u[k]
    return d


def _fd_vector_field(a: int, f: Callable, u: np.ndarray, h: float) -> complex:
    # X_a is the derivative along a straight line since its coefficients don't depend on x_a
    return _fd_directional(f, u, _field_direction(a, u), h)


def _fd_xa_xa(a: int, f: Callable, u: np.ndarray, h: float) -> complex:
    d = _field_direction(a, u)
    # X_a^2 f(u) = d^2/dt^2 f(u + t d) along the same line (d constant along it)
    c2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
    return sum(c * f(u + o * h * d) for c, o in zip(c2, _OFFSETS)) / h**2


def _periodic_fd_matrices(n: int, spacing: float):
    """4th-order periodic first and second derivative matrices (sparse)."""
    c1 = {-2: 1 / 12, -1: -8 / 12, 1: 8 / 12, 2: -1 / 12}
    c2 = {-2: -1 / 12, -1: 16 / 12, 0: -30 / 12, 1: 16 / 12, 2: -1 / 12}

    def circ(coeffs):
        m = sp.lil_matrix((n, n))
        for i in range(n):
            for off, c in coeffs.items():
                m[i, (i + off) % n] += c
        return m.tocsr()

    return circ(c1) / spacing, circ(c2) / spacing**2


def fiber_sublaplacian_matrix(fp: FiberParams, n: int, half_width: float) -> sp.csr_matrix:
    """Periodic 4th-order discretization of L^{rho omega} on an n^3 grid (C order)."""
    spacing = 2 * half_width / n
    D1, D2 = _periodic_fd_matrices(n, spacing)
    I = sp.identity(n, format="csr")
    axis = -half_width + spacing * np.arange(n)
    X = sp.diags(axis)

    def on(op, k):
        mats = [I, I, I]
        mats[k] = op
        return sp.kron(sp.kron(mats[0], mats[1]), mats[2], format="csr")

    w = fp.omega.omega
    rho = fp.rho
    M = -(on(D2, 0) + on(D2, 1) + on(D2, 2))
    for i in range(3):
        for j in range(3):
            for k in range(3):
                c = _LEVI[i, j, k] * w[j]
                if c:
                    # coefficient x_k (k != i) commutes with d/dx_i
                    M = M + (1j * rho * c) * (on(X, k) @ on(D1, i))
    xs = [on(X, k) for k in range(3)]
    r2 = xs[0] @ xs[0] + xs[1] @ xs[1] + xs[2] @ xs[2]
    wx = w[0] * xs[0] + w[1] * xs[1] + w[2] * xs[2]
    M = M + (rho**2 / 4) * (r2 - wx @ wx)
    return M.tocsr()


def apply_fiber_sublaplacian_grid(fp: FiberParams, g: GridFn3D) -> GridFn3D:
    M = fiber_sublaplacian_matrix(fp, g.n, g.half_width)
    return GridFn3D((M @ g.samples.ravel()).reshape(g.samples.shape), g.half_width)
