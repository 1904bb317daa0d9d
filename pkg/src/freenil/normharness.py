"""Mixed norms, restriction ratios, the sphere restriction probe and exponent bookkeeping.

``||f||_{s,p} = ( int_x ( int_z |f|^s dz )^{p/s} dx )^{1/p}``: the inner
exponent acts on the central variable and the outer one on the first layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .centralft import AnalyticFn
from .polygauss import PolyGauss, integrate
from .projector import QuadratureSpec, SpecInsufficient, project_mu_radial_grid
from .quadrature import gauss_legendre, sphere_rule
from .twisted import gamma_exponent, loglog_slope

S_THEOREM = Fraction(6, 5)
S_PROBE = Fraction(4, 3)


def conjugate(q):
    """Hoelder conjugate; exact for Fractions, ``inf`` at 1."""
    if q == 1:
        return float("inf")
    return q / (q - 1)


@dataclass(frozen=True)
class MixedNormParams:
    """Exponents (s, p); ``strict`` restricts to s <= 4/3 and p in [1, 2]."""

    s: float | Fraction
    p: float | Fraction
    strict: bool = True

    def __post_init__(self):
        if not 1 <= self.p <= 2:
            raise ValueError(f"p must lie in [1, 2], got {self.p}")
        hi = S_PROBE if self.strict else 2
        if not 1 <= self.s <= hi:
            raise ValueError(f"s must lie in [1, {hi}], got {self.s}")

    @property
    def s_conj(self):
        return conjugate(self.s)

    @property
    def p_conj(self):
        return conjugate(self.p)

    @property
    def in_theorem_range(self) -> bool:
        return self.s <= S_THEOREM

    @property
    def band(self) -> str:
        if self.s <= S_THEOREM:
            return "theorem"
        if self.s <= S_PROBE:
            return "experimental"
        return "out-of-range"


def _inv(q) -> float:
    return 0.0 if q == float("inf") else 1 / q


def dilation_exponent(mp: MixedNormParams) -> float:
    """Slope of the restriction ratio along the family f o delta_{sqrt mu}.

    P_mu(f o delta_e) = e^{-2} (P_{mu/e^2} f) o delta_e and
    ||h o delta_e||_{s,p} = e^{-6/s - 3/p} ||h||_{s,p} give
    3 (1/s - 1/s') + (3/2)(1/p - 1/2) - 1.
    """
    s, p = mp.s, mp.p
    return float(3 * (1 / s - _inv(mp.s_conj)) + 1.5 * (1 / p - 0.5) - 1)


def printed_exponent(mp: MixedNormParams) -> float:
    """The exponent 3(1/s - 1/s') + 3(1/p - 1/2) of the stated estimate."""
    return float(3 * (1 / mp.s - _inv(mp.s_conj)) + 3 * (1 / mp.p - 0.5))


# ---------------------------------------------------------------- mixed norms
@dataclass(frozen=True)
class TensorBox:
    """Uniform trapezoid grids on [-Lx, Lx]^3 x [-Lz, Lz]^3 (n nodes per axis, endpoints included).

    Spectrally accurate for smooth integrands that decay to the tail tolerance.
    """

    Lx: float = 5.0
    Lz: float = 5.0
    nx: int = 21
    nz: int = 21
    tail_tol: float = 1e-10


@dataclass(frozen=True)
class RadialBox:
    """Reduced rule for rotation-invariant functions: |x| in [0, Rx], |z| in [0, Rz], cos angle in [-1, 1]."""

    Rx: float = 8.0
    Rz: float = 16.0
    n_x: int = 24
    n_z: int = 48
    n_c: int = 16

    def scaled(self, eps: float) -> "RadialBox":
        """Box adapted to f o delta_eps."""
        return RadialBox(self.Rx / eps, self.Rz / eps**2, self.n_x, self.n_z, self.n_c)

    def doubled(self) -> "RadialBox":
        return RadialBox(self.Rx, self.Rz, 2 * self.n_x, 2 * self.n_z, 2 * self.n_c)

    def nodes(self):
        return gauss_legendre(self.n_x, 0, self.Rx), gauss_legendre(self.n_z, 0, self.Rz), gauss_legendre(self.n_c, -1, 1)


def _power_mean(vals, weights, q, axis):
    if q == float("inf"):
        return np.max(vals, axis=axis)
    return np.sum(weights * vals**q, axis=axis) ** (1 / q)


def _check_tail(fn, box: TensorBox):
    rng = np.random.default_rng(12345)
    n = 256
    face = rng.integers(0, 6, n)
    u = rng.uniform(-1, 1, (n, 6))
    u[np.arange(n), face] = rng.choice([-1.0, 1.0], n)
    x, z = u[:, :3] * box.Lx, u[:, 3:] * box.Lz
    edge = np.max(np.abs(fn(x, z)))
    v = rng.uniform(-0.5, 0.5, (n, 6))
    v[0] = 0.0
    inner = np.max(np.abs(fn(v[:, :3] * box.Lx, v[:, 3:] * box.Lz)))
    scale = max(inner, 1e-300)
    if edge > box.tail_tol * scale:
        raise ValueError(f"function not decayed at the box edge (relative {edge / scale:.2e})")


def _trapezoid(n: int, L: float):
    g = np.linspace(-L, L, n)
    w = np.full(n, g[1] - g[0])
    w[[0, -1]] *= 0.5
    return g, w


def mixed_norm(fn, s, p, box: TensorBox = TensorBox(), check_tail: bool = True) -> float:
    """Iterated norm of ``fn(x, z)`` (vectorized over leading axes) on tensor GL boxes."""
    if not (s >= 1 and p >= 1):
        raise ValueError("exponents must be >= 1")
    if check_tail:
        _check_tail(fn, box)
    gx, wx = _trapezoid(box.nx, box.Lx)
    gz, wz = _trapezoid(box.nz, box.Lz)
    X = np.stack(np.meshgrid(gx, gx, gx, indexing="ij"), -1).reshape(-1, 3)
    WX = np.einsum("i,j,k->ijk", wx, wx, wx).ravel()
    Z = np.stack(np.meshgrid(gz, gz, gz, indexing="ij"), -1).reshape(-1, 3)
    WZ = np.einsum("i,j,k->ijk", wz, wz, wz).ravel()
    inner = np.empty(len(X))
    step = max(1, 2**20 // len(Z))
    if isinstance(fn, AnalyticFn):
        parts = [(t.coef * t.x_part()(X), t.z_part()(Z)) for t in fn.terms]
    for i in range(0, len(X), step):
        if isinstance(fn, AnalyticFn):
            v = np.abs(sum(xp[i : i + step, None] * zp[None, :] for xp, zp in parts))
        else:
            v = np.abs(fn(X[i : i + step, None, :], Z[None, :, :]))
        inner[i : i + step] = _power_mean(v, WZ, float(s), axis=1)
    return float(_power_mean(inner, WX, float(p), axis=0))


def mixed_norm_radial(values: np.ndarray, box: RadialBox, s, p) -> float:
    """Norm of a rotation-invariant function sampled on ``box`` (see :meth:`RadialBox.nodes`)."""
    (R, wR), (r, wr), (c, wc) = box.nodes()
    a = np.abs(values)
    if s == float("inf"):
        inner = a.max(axis=(1, 2))
    else:
        s = float(s)
        inner = (2 * np.pi * np.einsum("j,l,ijl->i", wr * r * r, wc, a**s)) ** (1 / s)
    p = float(p)
    return float((4 * np.pi * np.sum(wR * R * R * inner**p)) ** (1 / p))


def analytic_mixed_norm(f: AnalyticFn, mp_s, mp_p, box: RadialBox = RadialBox(Rx=8.0, Rz=8.0)) -> float:
    """Norm of a rotation-invariant analytic function on the reduced rule."""
    if not f.is_radial():
        raise ValueError("reduced rule needs a rotation-invariant function")
    (R, _), (r, _), (c, _) = box.nodes()
    X = np.zeros((len(R), 1, 1, 3))
    X[..., 2] = R[:, None, None]
    sc = np.sqrt(1 - c * c)
    Z = np.zeros((1, len(r), len(c), 3))
    Z[..., 0] = r[:, None] * sc[None, :]
    Z[..., 2] = r[:, None] * c[None, :]
    vals = f(np.broadcast_to(X, (len(R), len(r), len(c), 3)), np.broadcast_to(Z, (len(R), len(r), len(c), 3)))
    return mixed_norm_radial(vals, box, mp_s, mp_p)


# --------------------------------------------------------- restriction ratio
def restriction_ratio(f: AnalyticFn, mu: float, mp: MixedNormParams, spec: QuadratureSpec,
                      box: RadialBox = RadialBox(), fbox: RadialBox | None = None) -> float:
    """||P_mu f||_{s', 2} / ||f||_{s, p} for rotation-invariant f; 0 for f = 0."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    if not f.terms:
        return 0.0
    (R, _), (r, _), (c, _) = box.nodes()
    P = project_mu_radial_grid(f, mu, spec, R, r, c)
    num = mixed_norm_radial(P, box, mp.s_conj, 2)
    den = analytic_mixed_norm(f, mp.s, mp.p, fbox if fbox is not None else RadialBox(8.0, 8.0, 32, 32, 16))
    return num / den


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    residual: float
    dilation_exponent: float
    printed_exponent: float
    band: str
    power_law: bool
    mus: tuple = ()
    ratios: tuple = ()

    @property
    def matches_dilation(self) -> bool:
        return abs(self.slope - self.dilation_exponent) <= 0.05


def mu_exponent_fit(f: AnalyticFn, mp: MixedNormParams, mus, spec: QuadratureSpec,
                    box: RadialBox = RadialBox(), rescale: bool = True, power_law_tol: float = 1e-3) -> ExponentFit:
    """Slope of log restriction_ratio against log mu.

    With ``rescale`` the input is f o delta_{sqrt mu} and both norm boxes are
    scaled with it; otherwise f is held fixed (diagnostic path).
    """
    mus = [float(m) for m in mus]
    if len(mus) < 4:
        raise ValueError("need at least four mu values")
    if max(mus) / min(mus) < 16:
        raise ValueError("mu values must span a factor of at least 16")
    fb = RadialBox(8.0, 8.0, 32, 32, 16)
    ratios = []
    for mu in mus:
        if rescale:
            e = np.sqrt(mu)
            ratios.append(restriction_ratio(f.dilate(e), mu, mp, spec, box.scaled(e), fb.scaled(e)))
        else:
            ratios.append(restriction_ratio(f, mu, mp, spec, box, fb))
    slope, resid = loglog_slope(mus, ratios)
    return ExponentFit(slope, resid, dilation_exponent(mp), printed_exponent(mp), mp.band, resid <= power_law_tol,
                        tuple(mus), tuple(float(r) for r in ratios))


# ---------------------------------------------------------- sphere probe
def fourier3(eta: PolyGauss, xi) -> complex:
    """int exp(-i x.xi) eta(x) dx in closed form."""
    return integrate(eta.plane_wave(-np.asarray(xi, dtype=float)))


def lebesgue_norm3(eta: PolyGauss, s, L: float = 8.0, n: int = 48) -> float:
    g, w = gauss_legendre(n, -L, L)
    X = np.stack(np.meshgrid(g, g, g, indexing="ij"), -1)
    W = np.einsum("i,j,k->ijk", w, w, w)
    return float(np.sum(W * np.abs(eta(X)) ** float(s)) ** (1 / float(s)))


def tomas_stein_ratio(eta: PolyGauss, r: float, s, n_theta: int = 16, n_phi: int = 32, eta_norm: float | None = None) -> float:
    """r^{3/s'} (int_S |eta^(r omega)|^2 d omega)^{1/2} / ||eta||_s."""
    if not 1 <= s <= S_PROBE:
        raise ValueError(f"s must lie in [1, 4/3], got {s}")
    if not r > 0:
        raise ValueError("r must be positive")
    if not eta.terms:
        return 0.0
    nodes, weights = sphere_rule(n_theta, n_phi)
    vals = np.array([fourier3(eta, r * w) for w in nodes])
    num = np.sqrt(np.sum(weights * np.abs(vals) ** 2))
    den = lebesgue_norm3(eta, s) if eta_norm is None else eta_norm
    return float(r ** (3 * _inv(conjugate(s))) * num / den)


# ---------------------------------------------------------- exponent arithmetic
def series_exponent(s, p):
    """E(s, p) = 6/s' - 3 + gamma(1/p) - (1/p - 1/2); exact for Fraction input."""
    if not 1 <= s <= S_PROBE:
        raise ValueError(f"s must lie in [1, 4/3], got {s}")
    if not 1 <= p <= 2:
        raise ValueError(f"p must lie in [1, 2], got {p}")
    half = Fraction(1, 2) if isinstance(p, Fraction) else 0.5
    inv_sc = 1 - 1 / s  # 1/s'
    return 6 * inv_sc - 3 + gamma_exponent(p) - (1 / p - half)


def series_claims(s, p) -> dict:
    """The two stated bounds as predicates (only meaningful for s <= 6/5)."""
    E = series_exponent(s, p)
    out = {"E": E, "applicable": s <= S_THEOREM}
    if p <= S_THEOREM:
        out["bound"] = -2
    else:
        out["bound"] = Fraction(-3, 2)
    out["holds"] = E <= out["bound"]
    return out


def gaussian_widths(n: int = 13) -> list[float]:
    """Geometric widths 4^j, j = -(n//2) .. n//2."""
    return [4.0**j for j in range(-(n // 2), n // 2 + 1)]


def tomas_stein_family_max(r: float, s, widths=None, **kw) -> float:
    """Largest ratio over the family exp(-c |x|^2) (a lower bound on the best constant)."""
    widths = gaussian_widths() if widths is None else widths
    best = 0.0
    for c in widths:
        eta = PolyGauss.gaussian(c * np.eye(3))
        norm = (np.pi / (float(s) * c)) ** (1.5 / float(s))
        best = max(best, tomas_stein_ratio(eta, r, s, eta_norm=norm, **kw))
    return best
