"""Two-dimensional twisted Laplacian and its spectral projections on grids.

    Delta^lam = -d_ss - d_tt - i lam (t d_s - s d_t) + lam^2/4 (s^2 + t^2)

has eigenvalues lam (2k + 1).  The projection onto the k-th eigenspace is the
twisted convolution with the Laguerre kernel

    phi_k^lam(w) = lam/(2 pi) L_k(lam |w|^2 / 2) exp(-lam |w|^2 / 4),
    (g x_lam h)(w) = int g(w - w') h(w') exp(i lam sigma(w, w') / 2) dw',
    sigma((s, t), (s', t')) = s t' - t s'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from fractions import Fraction

import numpy as np

# sign of the symplectic phase; fixed by the eigen-relation check in the tests
TWIST_SIGN = 1.0


@dataclass(frozen=True)
class TwistParams:
    lam: float
    k: int

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if self.k < 0 or int(self.k) != self.k:
            raise ValueError("k must be a nonnegative integer")


@dataclass(frozen=True)
class GridFn2D:
    """Samples on the periodic square [-L, L)^2.

    ``offset`` is 0 for node-centred grids (points -L + i h) and 0.5 for
    cell-centred grids (points -L + (i + 1/2) h).
    """

    samples: np.ndarray
    half_width: float
    offset: float = 0.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("GridFn2D samples must be square")
        n = s.shape[0]
        if n < 32 or n & (n - 1):
            raise ValueError(f"grid size must be a power of two >= 32, got {n}")
        if not self.half_width > 0:
            raise ValueError("half width must be positive")
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_function(cls, fn, n: int, half_width: float, offset: float = 0.0) -> "GridFn2D":
        ax = -half_width + (np.arange(n) + offset) * (2 * half_width / n)
        S, T = np.meshgrid(ax, ax, indexing="ij")
        return cls(np.asarray(fn(S, T), dtype=complex), half_width, offset)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def spacing(self) -> float:
        return 2 * self.half_width / self.n

    def axis(self) -> np.ndarray:
        return -self.half_width + (np.arange(self.n) + self.offset) * self.spacing

    def mesh(self):
        ax = self.axis()
        return np.meshgrid(ax, ax, indexing="ij")

    def like(self, samples) -> "GridFn2D":
        return GridFn2D(samples, self.half_width, self.offset)

    def norm(self, p: float = 2.0) -> float:
        return float((np.sum(np.abs(self.samples) ** p) * self.spacing**2) ** (1 / p))

    def inner(self, other: "GridFn2D") -> complex:
        return complex(np.vdot(other.samples, self.samples) * self.spacing**2)

    def tail_mass(self) -> float:
        """l2 mass on the outermost ring of samples relative to the total."""
        a = np.abs(self.samples) ** 2
        total = a.sum()
        if total == 0:
            return 0.0
        ring = a[0, :].sum() + a[-1, :].sum() + a[1:-1, 0].sum() + a[1:-1, -1].sum()
        return float(max(ring / total, 0.0))

    def is_admitted(self, tol: float = 1e-8) -> bool:
        return self.tail_mass() < tol

    def __add__(self, other):
        return self.like(self.samples + other.samples)

    def __sub__(self, other):
        return self.like(self.samples - other.samples)

    def __mul__(self, c):
        return self.like(c * self.samples)

    __rmul__ = __mul__


def laguerre(k: int, x, alpha: float = 0.0):
    """Generalized Laguerre polynomial L_k^alpha(x) by the three-term recurrence."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for j in range(k):
        prev, cur = cur, ((2 * j + 1 + alpha - x) * cur - (j + alpha) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def projection_kernel(tp: TwistParams, w) -> np.ndarray:
    """phi_k^lam at points ``w`` (last axis of length 2)."""
    w = np.asarray(w, dtype=float)
    r2 = np.sum(w * w, axis=-1)
    return tp.lam / (2 * np.pi) * laguerre(tp.k, tp.lam * r2 / 2) * np.exp(-tp.lam * r2 / 4)


def box_half_width(lam: float) -> float:
    return max(6.0, 14.0 / math.sqrt(lam))


def truncation_order(lam: float, radius: float) -> int:
    """Number of levels K needed for functions essentially supported in |w| < radius."""
    return int(math.ceil(max(8.0, lam * radius**2 / 2)))


def effective_radius(g: GridFn2D, rel: float = 1e-16) -> float:
    S, T = g.mesh()
    a = np.abs(g.samples)
    mask = a > rel * a.max() if a.max() > 0 else np.zeros_like(a, bool)
    if not mask.any():
        return 0.0
    return float(np.sqrt(S[mask] ** 2 + T[mask] ** 2).max())


# ----------------------------------------------------------------- convolution


def _offset_kernel_values(kernel, n: int, spacing: float) -> np.ndarray:
    """Kernel sampled on lattice offsets d h, d = -(n-1) .. n-1."""
    d = np.arange(-(n - 1), n) * spacing
    DS, DT = np.meshgrid(d, d, indexing="ij")
    return np.asarray(kernel(DS, DT), dtype=complex)


def _grid_as_offsets(g: GridFn2D) -> np.ndarray:
    """Node-centred samples re-indexed by lattice offset; zero outside the box."""
    n = g.n
    out = np.zeros((2 * n - 1, 2 * n - 1), dtype=complex)
    # node i sits at (i - n/2) h, i.e. offset index i - n/2 + (n - 1)
    lo = n // 2 - 1
    out[lo : lo + n, lo : lo + n] = g.samples
    return out


def _twisted_sum_direct(A_off, B: GridFn2D, lam: float, sign: float) -> np.ndarray:
    """out(w_i) = h^2 sum_j A(w_i - w_j) B(w_j) exp(i sign lam sigma(w_i, w_j) / 2)."""
    n = B.n
    h = B.spacing
    ax = B.axis()
    idx = np.arange(n)
    out = np.empty((n, n), dtype=complex)
    Bv = B.samples
    for i in range(n):
        ds = i - idx + n - 1  # (n,) over j-rows
        for m in range(n):
            dt = m - idx + n - 1
            A = A_off[np.ix_(ds, dt)]
            sigma = ax[i] * ax[None, :] - ax[m] * ax[:, None]
            out[i, m] = np.sum(A * Bv * np.exp(0.5j * sign * lam * sigma))
    return out * h * h


def _twisted_sum_fast(A_off, B: GridFn2D, lam: float, sign: float) -> np.ndarray:
    # sigma(w, w') = s t' - t s': the s t' factor folds into B, the t s' factor into
    # the output, leaving an ordinary linear convolution in t for each (s, s') pair
    n = B.n
    h = B.spacing
    ax = B.axis()
    N = 4 * n
    FA = np.fft.fft(A_off, N, axis=1)
    left = np.exp(-0.5j * sign * lam * np.outer(ax, ax))  # [m (t), j (s')]
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        Bs = B.samples * np.exp(0.5j * sign * lam * ax[i] * ax)[None, :]
        rows = FA[i + n - 1 : i - 1 if i > 0 else None : -1]  # offset i - j for j = 0..n-1
        C = np.fft.ifft(rows * np.fft.fft(Bs, N, axis=1), axis=1)[:, n - 1 : 2 * n - 1]
        out[i] = np.einsum("jm,mj->m", C, left)
    return out * h * h


def twisted_convolve(g: GridFn2D, h: GridFn2D, lam: float, method: str = "fast") -> GridFn2D:
    """g x_lam h on a node-centred grid by trapezoidal quadrature."""
    if g.n != h.n or g.half_width != h.half_width or g.offset != h.offset:
        raise ValueError("twisted convolution needs identical grids")
    if g.offset != 0.0 or g.n % 2:
        raise ValueError("sampled twisted convolution needs a node-centred grid")
    A_off = _grid_as_offsets(g)
    run = _twisted_sum_fast if method == "fast" else _twisted_sum_direct
    return h.like(run(A_off, h, lam, TWIST_SIGN))


def lambda_project(g: GridFn2D, tp: TwistParams, method: str = "fast") -> GridFn2D:
    """Lambda_k^lam g = g x_lam phi_k^lam, kernel evaluated in closed form."""
    # (g x phi)(w) = int g(u) phi(w - u) exp(-i lam sigma(w, u) / 2) du
    A_off = _offset_kernel_values(
        lambda s, t: projection_kernel(tp, np.stack([s, t], axis=-1)), g.n, g.spacing
    )
    run = _twisted_sum_fast if method == "fast" else _twisted_sum_direct
    return g.like(run(A_off, g, tp.lam, -TWIST_SIGN))


def max_resolved_level(lam: float, g: GridFn2D) -> int:
    """Largest k whose momentum radius sqrt(lam (2k+1)) stays below the grid Nyquist pi/h."""
    return int(((np.pi / g.spacing) ** 2 / lam - 1) // 2)


def partial_sum(g: GridFn2D, lam: float, K: int) -> GridFn2D:
    if K > max_resolved_level(lam, g):
        raise ValueError(f"level {K} exceeds what the grid resolves ({max_resolved_level(lam, g)}); refine the grid")
    out = g.like(np.zeros_like(g.samples))
    for k in range(K + 1):
        out = out + lambda_project(g, TwistParams(lam, k))
    return out


# ------------------------------------------------------------ differentiation


def _spectral_derivatives(g: GridFn2D):
    n = g.n
    freq = 2 * np.pi * np.fft.fftfreq(n, d=g.spacing)
    # drop the unpaired Nyquist mode so odd derivatives stay real-symmetric
    f1 = freq.copy()
    f1[n // 2] = 0.0
    F = np.fft.fft2(g.samples)
    KS, KT = np.meshgrid(f1, f1, indexing="ij")
    KS2, KT2 = np.meshgrid(freq**2, freq**2, indexing="ij")
    ds = np.fft.ifft2(1j * KS * F)
    dt = np.fft.ifft2(1j * KT * F)
    lap = np.fft.ifft2(-(KS2 + KT2) * F)
    return ds, dt, lap


def apply_twisted_laplacian(g: GridFn2D, lam: float) -> GridFn2D:
    S, T = g.mesh()
    ds, dt, lap = _spectral_derivatives(g)
    out = -lap - 1j * lam * (T * ds - S * dt) + lam**2 / 4 * (S**2 + T**2) * g.samples
    return g.like(out)


def eigen_residual(g: GridFn2D, tp: TwistParams) -> float:
    """Relative residual of Delta^lam (Lambda_k g) = lam (2k+1) Lambda_k g."""
    pg = lambda_project(g, tp)
    nrm = pg.norm()
    if nrm == 0:
        return 0.0
    r = apply_twisted_laplacian(pg, tp.lam) - tp.lam * (2 * tp.k + 1) * pg
    return r.norm() / nrm


# ------------------------------------------------------------- Koch-Ricci probe


def gamma_exponent(p: float) -> float:
    """Piecewise affine growth exponent gamma(1/p) for 1 <= p <= 2."""
    # exact for Fraction input
    one = Fraction(1) if isinstance(p, Fraction) else 1.0
    if not 1 <= p <= 2:
        raise ValueError(f"p must lie in [1, 2], got {p}")
    if p <= Fraction(6, 5):
        return one / p - one
    return one / 2 * (one / 2 - one / p)


def kr_normalizer(lam: float, k: int, p: float) -> float:
    return lam ** (1 / p - 0.5) * (2 * k + 1) ** gamma_exponent(p)


def kr_ratio_probe(tp: TwistParams, p: float, family) -> float:
    """max over the family of ||Lambda_k f||_2 / (lam^{1/p-1/2} (2k+1)^gamma) with ||f||_p = 1."""
    family = list(family)
    if not family:
        raise ValueError("probe family is empty")
    best = 0.0
    for f in family:
        f = f * (1.0 / f.norm(p))
        best = max(best, lambda_project(f, tp).norm() / kr_normalizer(tp.lam, tp.k, p))
    return best


def loglog_slope(x, y) -> tuple[float, float]:
    """Least-squares slope of log y against log x and the rms fit residual."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid**2)))


def kr_family(lam: float, n: int = 128, widths=(0.125, 0.25, 0.5, 1.0, 2.0), half_width: float | None = None) -> list:
    """Gaussians exp(-c lam |w|^2); scaling with lam makes the normalized ratios lam-free."""
    L = box_half_width(lam) if half_width is None else half_width
    return [GridFn2D.from_function(lambda s, t, c=c: np.exp(-c * lam * (s * s + t * t)), n, L) for c in widths]


def kr_sweep(lam: float, ps, ks, family) -> dict:
    """{p: [family-max normalized ratio for each k]}; one projection per (member, k)."""
    family = list(family)
    out = {p: [0.0] * len(ks) for p in ps}
    for f in family:
        norms = {p: f.norm(p) for p in ps}
        for i, k in enumerate(ks):
            proj = lambda_project(f, TwistParams(lam, k)).norm()
            for p in ps:
                out[p][i] = max(out[p][i], proj / norms[p] / kr_normalizer(lam, k, p))
    return out
