"""Closed-form spectral projections of polynomial x Gaussian functions in the plane.

The k-th eigenspace of the twisted Laplacian splits into angular sectors
``exp(i l theta)``; each sector holds exactly one function

    psi_{k,l}^lam(s, t) = p_l(z) L_{n}^{|l|}(lam r^2 / 2) exp(-lam r^2 / 4),

with ``z = s + i t``, ``p_l = z^l`` for ``l >= 0`` and ``conj(z)^{|l|}`` otherwise.
``chirality = +1`` is the operator with twist ``-i lam (t d_s - s d_t)`` (so
``n = k`` for ``chirality * l >= 0`` and ``n = k - |l|`` otherwise);
``chirality = -1`` is its complex conjugate.

Projection of a monomial ``z^m conj(z)^n exp(-a r^2)`` onto level k is a
multiple of ``psi_{k, m-n}``; the multiple reduces to Laplace transforms of
Laguerre polynomials, which are evaluated without alternating sums.
"""

from __future__ import annotations

import numpy as np
from scipy.special import eval_genlaguerre, gammaln


def radial_index(k, ell: int, chirality: int = 1):
    """Laguerre degree of psi_{k,l}; negative where the sector is absent from level k."""
    k = np.asarray(k)
    return np.where(chirality * ell >= 0, k, k - abs(ell))


def _laguerre_laplace(n, alpha: int, d: int, s):
    """int_0^inf t^{alpha+d} L_n^alpha(t) exp(-s t) dt (n may be an array)."""
    n = np.asarray(n)
    s = np.asarray(s, dtype=float)
    if d == 0:
        nn = np.maximum(n, 0)
        base = np.exp(gammaln(nn + alpha + 1) - gammaln(nn + 1))
        val = base * ((s - 1) / s) ** nn / s ** (alpha + 1)
        return np.where(n >= 0, val, 0.0)
    # t L_n = (2n + a + 1) L_n - (n + 1) L_{n+1} - (n + a) L_{n-1}
    return (
        (2 * n + alpha + 1) * _laguerre_laplace(n, alpha, d - 1, s)
        - (n + 1) * _laguerre_laplace(n + 1, alpha, d - 1, s)
        - (n + alpha) * _laguerre_laplace(n - 1, alpha, d - 1, s)
    )


def monomial_coefficient(m: int, n: int, a: float, lam, k, chirality: int = 1):
    """c with Lambda_k^lam(z^m zbar^n exp(-a r^2)) = c psi_{k, m-n}^lam."""
    lam = np.asarray(lam, dtype=float)
    ell = m - n
    alpha = abs(ell)
    d = min(m, n)
    nr = radial_index(k, ell, chirality)
    s = 2 * a / lam + 0.5
    J = _laguerre_laplace(nr, alpha, d, s)
    nrc = np.maximum(nr, 0)
    norm = np.exp(gammaln(nrc + alpha + 1) - gammaln(nrc + 1))
    return np.where(nr >= 0, (2 / lam) ** d * J / norm, 0.0)


def _angular_powers(s, t, ell: int):
    """p_l and its first and second derivatives in (s, t)."""
    alpha = abs(ell)
    sig = 1.0 if ell >= 0 else -1.0
    z = s + 1j * sig * t

    def zp(e):
        return z**e if e >= 0 else np.zeros_like(z)

    p = zp(alpha)
    ps = alpha * zp(alpha - 1)
    pt = 1j * sig * ps
    pss = alpha * (alpha - 1) * zp(alpha - 2)
    pst = 1j * sig * pss
    ptt = -pss
    return p, ps, pt, pss, pst, ptt


def psi(k, ell: int, lam, s, t, chirality: int = 1):
    """psi_{k,l}^lam(s, t); zero where the sector is absent from level k."""
    nr = radial_index(k, ell, chirality)
    lam = np.asarray(lam, dtype=float)
    q = s * s + t * t
    x = lam * q / 2
    alpha = abs(ell)
    L = eval_genlaguerre(np.maximum(nr, 0), alpha, x)
    p = _angular_powers(s, t, ell)[0]
    return np.where(nr >= 0, p * L * np.exp(-x / 2), 0.0)


def psi_jet(k, ell: int, lam, s, t, chirality: int = 1):
    """psi and its derivatives (d_s, d_t, d_ss, d_st, d_tt)."""
    nr = radial_index(k, ell, chirality)
    lam = np.asarray(lam, dtype=float)
    alpha = abs(ell)
    q = s * s + t * t
    x = lam * q / 2
    nrc = np.maximum(nr, 0)
    E = np.exp(-x / 2)
    L0 = eval_genlaguerre(nrc, alpha, x)
    L1 = -np.where(nrc >= 1, eval_genlaguerre(np.maximum(nrc - 1, 0), alpha + 1, x), 0.0)
    L2 = np.where(nrc >= 2, eval_genlaguerre(np.maximum(nrc - 2, 0), alpha + 2, x), 0.0)
    # F(q) = L(lam q / 2) exp(-lam q / 4) and its q-derivatives
    F = L0 * E
    F1 = (lam / 2 * L1 - lam / 4 * L0) * E
    F2 = ((lam / 2) ** 2 * L2 - lam**2 / 4 * L1 + (lam / 4) ** 2 * L0) * E
    p, ps, pt, pss, pst, ptt = _angular_powers(s, t, ell)
    val = p * F
    ds = ps * F + 2 * s * p * F1
    dt = pt * F + 2 * t * p * F1
    dss = pss * F + 4 * s * ps * F1 + p * (2 * F1 + 4 * s * s * F2)
    dtt = ptt * F + 4 * t * pt * F1 + p * (2 * F1 + 4 * t * t * F2)
    dst = pst * F + 2 * t * ps * F1 + 2 * s * pt * F1 + 4 * s * t * p * F2
    present = nr >= 0
    return tuple(np.where(present, v, 0.0) for v in (val, ds, dt, dss, dst, dtt))


def real_to_complex_monomials(poly2: dict) -> dict:
    """Rewrite a polynomial in (s, t) as sum c_{m,n} z^m zbar^n."""
    from math import comb

    out: dict = {}
    for (i, j), c in poly2.items():
        # s^i t^j = ((z + zb)/2)^i ((z - zb)/(2i))^j
        for a in range(i + 1):
            ca = comb(i, a) / 2**i
            for b in range(j + 1):
                cb = comb(j, b) * (-1) ** (j - b) / (2j) ** j
                key = (a + b, (i - a) + (j - b))
                out[key] = out.get(key, 0.0) + c * ca * cb
    return {k: v for k, v in out.items() if abs(v) > 0}


def project_polygauss_2d(poly2: dict, a: float, lam, k, chirality: int = 1) -> dict:
    """Lambda_k of P(s, t) exp(-a r^2) as {l: coefficient of psi_{k,l}}."""
    out: dict = {}
    for (m, n), c in real_to_complex_monomials(poly2).items():
        coef = c * monomial_coefficient(m, n, a, lam, k, chirality)
        out[m - n] = out.get(m - n, 0.0) + coef
    return out
