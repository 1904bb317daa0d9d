"""Spectral density of the sub-Laplacian on the analytic family.

For mu > 0,

    P_mu f(x, z) = (2 pi)^{-4} int_S sum_k (2k+1)^{-3} int_{-sqrt mu}^{sqrt mu}
                   exp(i rho_k omega.z) exp(i xi v) (mu - xi^2)^2
                   [Lambda_k^{rho_k} F_omega g_{rho_k, omega}](s, t; xi) d xi d omega,

with ``rho_k = (mu - xi^2) / (2k + 1)`` and ``(s, t, v) = R_omega x``.  Every
summand is an exact eigenfunction of L with eigenvalue mu, so the eigen-relation
is checked by differentiating the summands in closed form.

The fiber operator acting on ``exp(+i rho omega.z) G(x)`` is the complex
conjugate of the twisted Laplacian with twist ``-i rho (t d_s - s d_t)``, so the
Landau sectors are taken with ``chirality = -1``.

Supported terms: centred in x (``x0 = 0``); z-shifts are allowed.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import landau
from .centralft import AnalyticFn
from .nilgeom import Direction, GroupPoint, adapted_frame
from .polygauss import poly_substitute
from .quadrature import QuadratureSpec

CHIRALITY = -1
NORM = (2 * np.pi) ** -4
DEFAULT_K_TOL = 1e-4


class SpecInsufficient(ValueError):
    """Raised when a quadrature component is too coarse; ``component`` names it."""

    def __init__(self, component: str, estimate: float, message: str):
        super().__init__(f"{component}: {message} (estimate {estimate:.3g})")
        self.component = component
        self.estimate = estimate


class Unsupported(ValueError):
    pass


@dataclass(frozen=True)
class SpectralSlice:
    mu: float
    points: tuple
    values: np.ndarray = field(repr=False)
    spec: QuadratureSpec = field(repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite spectral values")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["mu", "point", "x1", "x2", "x3", "z1", "z2", "z3", "re", "im"])
        for i, (p, v) in enumerate(zip(self.points, self.values)):
            w.writerow([repr(float(self.mu)), i, *map(repr, map(float, p.x)), *map(repr, map(float, p.z)),
                        repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()

    def sidecar(self) -> str:
        return json.dumps({"mu": float(self.mu), "quadrature": self.spec.to_dict(),
                           "n_points": len(self.points)}, indent=2, sort_keys=True)


def default_points(n: int = 16, seed: int = 0, radius: float = 1.0) -> list[GroupPoint]:
    rng = np.random.default_rng(seed)
    return [GroupPoint(rng.uniform(-radius, radius, 3) / np.sqrt(3), rng.uniform(-radius, radius, 3) / np.sqrt(3))
            for _ in range(n)]


def _check_supported(f: AnalyticFn):
    for t in f.terms:
        if any(t.x0):
            raise Unsupported("spectral projection needs terms centred in x (x0 = 0)")


def fourier_moments(a: float, xi: np.ndarray, jmax: int) -> np.ndarray:
    """I_j(xi) = int v^j exp(-a v^2 - i xi v) dv for j <= jmax, shape (jmax+1, len(xi))."""
    xi = np.asarray(xi, dtype=float)
    out = np.zeros((jmax + 1,) + xi.shape, dtype=complex)
    out[0] = np.sqrt(np.pi / a) * np.exp(-xi * xi / (4 * a))
    if jmax >= 1:
        out[1] = -1j * xi * out[0] / (2 * a)
    for j in range(1, jmax):
        out[j + 1] = (j * out[j - 1] - 1j * xi * out[j]) / (2 * a)
    return out


def _term_sectors(term, R: np.ndarray) -> dict:
    """Complex-monomial coefficients of P(R^T u), keyed (m, n) -> {v power: coef}."""
    poly = dict(term.poly)
    if all(e == (0, 0, 0) for e in poly):
        return {(0, 0): {0: poly.get((0, 0, 0), 0.0)}}
    rotated = poly_substitute(poly, R.T)
    by_v: dict = {}
    for (i, j, l), c in rotated.items():
        by_v.setdefault(l, {})[(i, j)] = c
    out: dict = {}
    for l, p2 in by_v.items():
        for mn, c in landau.real_to_complex_monomials(p2).items():
            out.setdefault(mn, {})[l] = out.get(mn, {}).get(l, 0.0) + c
    return out


@dataclass
class _Fiber:
    """Per-(omega) data: sector amplitudes over the (xi, k) grid."""

    amps: dict  # ell -> complex array (n_xi, K)


def _fiber_amplitudes(f: AnalyticFn, omega: np.ndarray, R: np.ndarray, xi, lam, kk) -> dict:
    amps: dict = {}
    for t in f.terms:
        sectors = _term_sectors(t, R)
        jmax = max(max(d) for d in sectors.values())
        I = fourier_moments(t.a, xi, jmax)  # (J, n_xi)
        zh = t.z_hat(lam[..., None] * omega) * t.coef  # (n_xi, K)
        for (m, n), byv in sectors.items():
            c = sum(v * I[j] for j, v in byv.items())[:, None]
            mc = landau.monomial_coefficient(m, n, t.a, lam, kk, CHIRALITY)
            ell = m - n
            amps[ell] = amps.get(ell, 0.0) + c * mc * zh
    return amps


def _grid(mu: float, spec: QuadratureSpec):
    xi, wx = spec.xi_rule(mu)
    K = spec.k_max + 1
    kk = np.arange(K)[None, :]
    lam = (mu - xi[:, None] ** 2) / (2 * kk + 1)
    w = (wx * (mu - xi**2) ** 2)[:, None] * (2.0 * kk + 1) ** -3.0 * NORM
    return xi, kk, lam, w


def _omega_contribution(f, grid, spec, omega, w_omega, X, Z, jet=False, per_k=False):
    frame = adapted_frame(Direction(omega), spec.gauge)
    R = frame.R
    xi, kk, lam, w = grid
    amps = _fiber_amplitudes(f, omega, R, xi, lam, kk)
    u = X @ R.T  # (P, 3): s, t, v
    s, t, v = u[:, 0], u[:, 1], u[:, 2]
    # shape (n_xi, K, P)
    phase = np.exp(1j * (lam[..., None] * (Z @ omega)[None, None, :] + xi[:, None, None] * v[None, None, :]))
    W = (w * w_omega)[..., None]
    k3, l3 = kk[..., None], lam[..., None]
    if not jet:
        acc = 0.0
        for ell, A in amps.items():
            acc = acc + A[..., None] * landau.psi(k3, ell, l3, s, t, CHIRALITY)
        terms = W * phase * acc
        return terms.sum(axis=0) if per_k else terms.sum(axis=(0, 1))
    return _apply_L_terms(amps, R, omega, xi, k3, l3, s, t, X, W * phase)


def _apply_L_terms(amps, R, omega, xi, k3, l3, s, t, X, Wphase):
    """Value and L-image of the summands at the points (full six-dimensional L)."""
    val = 0.0
    grad_st = [0.0, 0.0]
    hess = [0.0, 0.0, 0.0]
    for ell, A in amps.items():
        p, ds, dt, dss, dst, dtt = landau.psi_jet(k3, ell, l3, s, t, CHIRALITY)
        a = A[..., None]
        val = val + a * p
        grad_st = [grad_st[0] + a * ds, grad_st[1] + a * dt]
        hess = [hess[0] + a * dss, hess[1] + a * dst, hess[2] + a * dtt]
    Xw, Yw = R[0], R[1]
    ix = 1j * xi[:, None, None]
    # H(x) = exp(i xi v) psi(s, t); grad and Laplacian in x
    grad = (
        ix[..., None] * val[..., None] * omega
        + grad_st[0][..., None] * Xw
        + grad_st[1][..., None] * Yw
    )
    lap = ix**2 * val + hess[0] + hess[2]  # cross terms vanish: omega is orthogonal to X_w, Y_w
    rho = l3
    # on exp(i rho omega.z) H: grad_z -> i rho omega, Lap_z -> -rho^2, (x.grad_z)^2 -> -rho^2 (x.omega)^2
    xcg = np.cross(X[None, None, :, :], grad)
    cross_term = 1j * rho * (xcg @ omega)
    x2 = np.sum(X * X, axis=-1)
    xo = X @ omega
    LH = -lap - cross_term + 0.25 * rho**2 * (x2 - xo**2) * val
    return (Wphase * val).sum(axis=(0, 1)), (Wphase * LH).sum(axis=(0, 1))


def _points_arrays(points):
    X = np.array([p.x for p in points], dtype=float).reshape(-1, 3)
    Z = np.array([p.z for p in points], dtype=float).reshape(-1, 3)
    return X, Z


def check_spec(f: AnalyticFn, mu: float, spec: QuadratureSpec, points) -> None:
    """A priori bandwidth checks for the sphere and xi rules."""
    X, Z = _points_arrays(points)
    if not f.terms or len(X) == 0:
        return
    T = np.log(1e12)
    bmax = max(t.b for t in f.terms)
    deg = max(max((sum(e) for e, _ in t.poly), default=0) for t in f.terms)
    rho_eff = min(mu, 2 * np.sqrt(bmax * T))
    xmax = np.max(np.linalg.norm(X, axis=-1))
    zmax = np.max(np.linalg.norm(Z, axis=-1))
    kappa = rho_eff * zmax + np.sqrt(mu) * xmax + deg
    if kappa + 4 > 2 * spec.n_theta - 1 or kappa + 4 > spec.n_phi:
        raise SpecInsufficient("sphere", kappa, "angular bandwidth exceeds the sphere rule")
    xb = np.sqrt(mu) * xmax + deg
    if xb + 8 > 2 * spec.xi_nodes - 1:
        raise SpecInsufficient("xi", xb, "oscillation in xi exceeds the Gauss-Legendre rule")


def _run(f, mu, spec, X, Z, jet=False, per_k=False, workers: int = 1):
    nodes, weights = spec.sphere_nodes, spec.sphere_weights
    idx = list(range(len(nodes)))
    if workers > 1:
        chunks = [idx[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_chunk, [(f, mu, spec, c, X, Z, jet, per_k) for c in chunks]))
        results = [None] * len(idx)
        for c, part in zip(chunks, parts):
            for i, r in zip(c, part):
                results[i] = r
    else:
        results = _chunk((f, mu, spec, idx, X, Z, jet, per_k))
    # fixed-order pairwise reduction over omega nodes
    if jet:
        return np.sum(np.stack([r[0] for r in results]), axis=0), np.sum(np.stack([r[1] for r in results]), axis=0)
    return np.sum(np.stack(results), axis=0)


def _chunk(args):
    f, mu, spec, idx, X, Z, jet, per_k = args
    grid = _grid(mu, spec)
    return [
        _omega_contribution(f, grid, spec, spec.sphere_nodes[i], spec.sphere_weights[i], X, Z, jet, per_k)
        for i in idx
    ]


def project_mu(f: AnalyticFn, mu: float, spec: QuadratureSpec, points, workers: int = 1,
               check: bool = True, k_tol: float = DEFAULT_K_TOL) -> SpectralSlice:
    if not mu > 0:
        raise ValueError("mu must be positive")
    _check_supported(f)
    points = tuple(points)
    X, Z = _points_arrays(points)
    if not f.terms or len(points) == 0:
        return SpectralSlice(float(mu), points, np.zeros(len(points), dtype=complex), spec)
    if check:
        check_spec(f, mu, spec, points)
    per_k = _run(f, mu, spec, X, Z, per_k=True, workers=workers)  # (K, P)
    vals = per_k.sum(axis=0)
    if check:
        tail = k_tail_estimate(per_k)
        scale = max(np.linalg.norm(vals), np.max(np.abs(per_k)) if per_k.size else 0.0)
        if scale > 0 and tail > k_tol * scale:
            raise SpecInsufficient("k", tail / scale, "k-truncation tail exceeds tolerance")
    return SpectralSlice(float(mu), points, vals, spec)


def k_tail_estimate(per_k: np.ndarray) -> float:
    """Tail beyond k_max assuming the observed algebraic decay ~ k^{-4}."""
    K = per_k.shape[0]
    if K < 4:
        return float(np.linalg.norm(per_k[-1]))
    last = np.linalg.norm(per_k[-1])
    # sum_{k > K} (K/k)^4 ~ K/3
    return float(last * K / 3)


def fiber_decompose(f: AnalyticFn, rho: float, omega: Direction, k_max: int, p: GroupPoint,
                    gauge: float = 0.0, xi_nodes: int = 129, tol: float = 1e-6) -> np.ndarray:
    """Per-k terms of f^{rho omega}(x) = sum_k (2 pi)^{-1} int exp(i xi v) Lambda_k F g d xi."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    _check_supported(f)
    if not f.terms:
        return np.zeros(k_max + 1, dtype=complex)
    frame = adapted_frame(omega, gauge)
    R = frame.R
    amax = max(t.a for t in f.terms)
    Xi = 2 * np.sqrt(amax * np.log(1e16)) + 4
    xg, wg = np.polynomial.legendre.leggauss(xi_nodes)
    xi, wx = Xi * xg, Xi * wg
    kk = np.arange(k_max + 1)[None, :]
    lam = np.full((len(xi), k_max + 1), float(rho))
    # fixed rho: the central factor is z_hat(rho omega); reuse the amplitude code
    amps = {}
    for t in f.terms:
        sectors = _term_sectors(t, R)
        jmax = max(max(d) for d in sectors.values())
        I = fourier_moments(t.a, xi, jmax)
        zh = complex(t.z_hat(rho * omega.omega)) * t.coef
        for (m, n), byv in sectors.items():
            c = sum(v * I[j] for j, v in byv.items())[:, None]
            mc = landau.monomial_coefficient(m, n, t.a, lam, kk, CHIRALITY)
            amps[m - n] = amps.get(m - n, 0.0) + c * mc * zh
    s, t_, v = R @ p.x
    acc = 0.0
    for ell, A in amps.items():
        acc = acc + A * landau.psi(kk, ell, lam, s, t_, CHIRALITY)
    terms = ((wx * np.exp(1j * xi * v))[:, None] * acc).sum(axis=0) / (2 * np.pi)
    if k_max >= 3:
        est = abs(terms[-1]) * k_max
        if est > tol * max(np.max(np.abs(terms)), 1e-300) and np.max(np.abs(terms)) > 0:
            raise SpecInsufficient("k", est, "k_max too small for the requested tolerance")
    return terms


def reconstruct(f: AnalyticFn, spec: QuadratureSpec, points, workers: int = 1) -> np.ndarray:
    """sum over the mu grid of weighted P_mu f at the points."""
    if not spec.mu_nodes:
        raise ValueError("quadrature spec has no mu grid")
    points = tuple(points)
    out = np.zeros(len(points), dtype=complex)
    for mu, w in zip(spec.mu_nodes, spec.mu_weights):
        out = out + w * project_mu(f, mu, spec, points, workers, check=False).values
    return out


def mu_range(f: AnalyticFn, tol: float = 1e-7) -> tuple[float, float]:
    """[0, mu_max] capturing the spectral density of f up to ``tol``."""
    T = np.log(1 / tol)
    amax = max(t.a for t in f.terms)
    bmax = max(t.b for t in f.terms)
    return 0.0, 4 * amax * T + 2 * np.sqrt(bmax * T)


def default_spec(f: AnalyticFn | None = None, n_mu: int = 48) -> QuadratureSpec:
    if f is None or not f.terms:
        return QuadratureSpec()
    lo, hi = mu_range(f)
    return QuadratureSpec.with_mu_range(lo, hi, n_mu)


@dataclass(frozen=True)
class EigenResult:
    residual: float
    indeterminate: bool
    norm: float


def eigen_residual(f: AnalyticFn, mu: float, spec: QuadratureSpec, points=None, workers: int = 1) -> EigenResult:
    """||L P_mu f - mu P_mu f|| / ||mu P_mu f|| over the evaluation set."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    _check_supported(f)
    points = tuple(default_points() if points is None else points)
    X, Z = _points_arrays(points)
    fn = np.linalg.norm([f.at(p) for p in points]) if f.terms else 0.0
    if not f.terms:
        return EigenResult(float("nan"), True, 0.0)
    val, Lval = _run(f, mu, spec, X, Z, jet=True, workers=workers)
    nv = np.linalg.norm(val)
    if nv < 1e-10 * max(fn, 1e-300):
        return EigenResult(float("nan"), True, float(nv))
    return EigenResult(float(np.linalg.norm(Lval - mu * val) / (mu * nv)), False, float(nv))


def dilation_covariance_residual(f: AnalyticFn, mu: float, eps: float, spec: QuadratureSpec,
                                 points=None, workers: int = 1) -> float:
    """Relative gap between P_mu(f o delta_eps) and eps^{-2} (P_{mu/eps^2} f) o delta_eps."""
    if not (mu > 0 and eps > 0):
        raise ValueError("mu and eps must be positive")
    points = tuple(default_points() if points is None else points)
    lhs = project_mu(f.dilate(eps), mu, spec, points, workers, check=False).values
    moved = tuple(GroupPoint(eps * p.x, eps**2 * p.z) for p in points)
    rhs = eps**-2 * project_mu(f, mu / eps**2, spec, moved, workers, check=False).values
    den = np.linalg.norm(rhs)
    if den == 0:
        return float(np.linalg.norm(lhs))
    return float(np.linalg.norm(lhs - rhs) / den)


def project_mu_radial(f: AnalyticFn, mu: float, spec: QuadratureSpec, xr, zr, c, chunk: int = 64) -> np.ndarray:
    """P_mu f for rotation-invariant f at |x| = xr, |z| = zr, cos(angle(x, z)) = c.

    With x along e3 the azimuthal integral is 2 pi J0(rho |z| sqrt(1-c^2) sin theta),
    leaving a Gauss-Legendre rule in cos(theta) with ``spec.n_theta`` nodes.
    """
    from scipy.special import j0

    if not mu > 0:
        raise ValueError("mu must be positive")
    if not f.is_radial():
        raise Unsupported("the reduced path needs a rotation-invariant function")
    xr, zr, c = (np.asarray(v, dtype=float).ravel() for v in np.broadcast_arrays(xr, zr, c))
    if not f.terms:
        return np.zeros(xr.shape, dtype=complex)
    xi, kk, lam, w = _grid(mu, spec)
    amp = 0.0
    for t in f.terms:
        I0 = fourier_moments(t.a, xi, 0)[0][:, None]
        coef = dict(t.poly).get((0, 0, 0), 0.0) * t.coef
        amp = amp + coef * I0 * landau.monomial_coefficient(0, 0, t.a, lam, kk, CHIRALITY) * t.z_hat(lam[..., None] * np.array([0.0, 0.0, 1.0]))
    Wa = w * amp  # (n_xi, K)
    ct, wt = np.polynomial.legendre.leggauss(spec.n_theta)
    st = np.sqrt(1 - ct * ct)
    out = np.empty(xr.shape, dtype=complex)
    # axes: (theta, xi, K, points)
    C, S = ct[:, None, None, None], st[:, None, None, None]
    L4 = lam[None, :, :, None]
    X4 = xi[None, :, None, None]
    for i0 in range(0, len(xr), chunk):
        sl = slice(i0, i0 + chunk)
        R, r, cc = xr[sl], zr[sl], c[sl]
        sc = np.sqrt(np.clip(1 - cc * cc, 0, None))
        rperp = R * S
        psi = landau.psi(kk[None, :, :, None], 0, L4, rperp, 0.0 * rperp, CHIRALITY)
        ph = np.exp(1j * (L4 * r * cc * C + X4 * R * C))
        bes = j0(L4 * r * sc * S)
        ang = 2 * np.pi * np.einsum("t,tjkp->jkp", wt, ph * bes * psi)
        out[sl] = np.einsum("jk,jkp->p", Wa, ang)
    return out


def project_mu_radial_grid(f: AnalyticFn, mu: float, spec: QuadratureSpec, xr, zr, c) -> np.ndarray:
    """P_mu f on the tensor grid xr x zr x c (rotation-invariant f), shape (len xr, len zr, len c).

    Same rule as :func:`project_mu_radial`; factors depending on |x| and on
    (|z|, c) are evaluated separately and contracted over theta.
    """
    from scipy.special import j0

    if not mu > 0:
        raise ValueError("mu must be positive")
    if not f.is_radial():
        raise Unsupported("the reduced path needs a rotation-invariant function")
    xr, zr, c = (np.asarray(v, dtype=float).ravel() for v in (xr, zr, c))
    if not f.terms:
        return np.zeros((len(xr), len(zr), len(c)), dtype=complex)
    xi, kk, lam, w = _grid(mu, spec)
    amp = 0.0
    for t in f.terms:
        I0 = fourier_moments(t.a, xi, 0)[0][:, None]
        coef = dict(t.poly).get((0, 0, 0), 0.0) * t.coef
        amp = amp + coef * I0 * landau.monomial_coefficient(0, 0, t.a, lam, kk, CHIRALITY) * t.z_hat(lam[..., None] * np.array([0.0, 0.0, 1.0]))
    Wa = (w * amp).ravel()  # (J,) with J = n_xi * K
    ct, wt = np.polynomial.legendre.leggauss(spec.n_theta)
    st = np.sqrt(1 - ct * ct)
    lamf = lam.ravel()
    xif = np.repeat(xi, lam.shape[1])
    kf = np.broadcast_to(kk, lam.shape).ravel()
    # x-factor: (theta, J, R)
    C, S = ct[:, None, None], st[:, None, None]
    psi = landau.psi(kf[None, :, None], 0, lamf[None, :, None], xr[None, None, :] * S, 0.0 * S * xr, CHIRALITY)
    Fx = (wt[:, None, None] * Wa[None, :, None]) * np.exp(1j * xif[None, :, None] * xr * C) * psi
    out = np.empty((len(xr), len(zr), len(c)), dtype=complex)
    sc = np.sqrt(np.clip(1 - c * c, 0, None))
    for j, r in enumerate(zr):
        # z-factor: (theta, J, c)
        Fz = np.exp(1j * lamf[None, :, None] * r * c * C) * j0(lamf[None, :, None] * r * sc * S)
        out[:, j, :] = 2 * np.pi * np.einsum("tjR,tjc->Rc", Fx, Fz, optimize=True)
    return out
