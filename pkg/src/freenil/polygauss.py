"""Closed-form polynomial x Gaussian functions on R^n.

A :class:`PolyGauss` is a finite sum of terms

    P(y) * exp(-y^T A y + b.y + c),   y = u - u0,

with ``P`` a sparse complex polynomial, ``A`` complex symmetric, ``b`` complex.
The family is closed under differentiation, multiplication by coordinates,
invertible linear changes of variables and multiplication by plane waves, so
differential identities can be checked without any discretization error.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Mapping

import numpy as np

Poly = dict  # tuple[int, ...] -> complex


def poly_add(p: Mapping, q: Mapping, scale: complex = 1.0) -> Poly:
    out = dict(p)
    for e, v in q.items():
        out[e] = out.get(e, 0.0) + scale * v
    return {e: v for e, v in out.items() if v != 0}


def poly_scale(p: Mapping, s: complex) -> Poly:
    if s == 0:
        return {}
    return {e: s * v for e, v in p.items()}


def poly_mul(p: Mapping, q: Mapping) -> Poly:
    out: Poly = {}
    for e1, v1 in p.items():
        for e2, v2 in q.items():
            e = tuple(i + j for i, j in zip(e1, e2))
            out[e] = out.get(e, 0.0) + v1 * v2
    return {e: v for e, v in out.items() if v != 0}


def poly_diff(p: Mapping, i: int) -> Poly:
    out: Poly = {}
    for e, v in p.items():
        if e[i] == 0:
            continue
        f = list(e)
        f[i] -= 1
        f = tuple(f)
        out[f] = out.get(f, 0.0) + e[i] * v
    return out


def poly_mulvar(p: Mapping, i: int) -> Poly:
    out: Poly = {}
    for e, v in p.items():
        f = list(e)
        f[i] += 1
        out[tuple(f)] = v
    return out


def poly_degree(p: Mapping) -> int:
    return max((sum(e) for e in p), default=0)


def poly_eval(p: Mapping, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    out = np.zeros(y.shape[:-1], dtype=complex)
    for e, v in p.items():
        term = np.full(y.shape[:-1], v, dtype=complex)
        for i, k in enumerate(e):
            if k:
                term = term * y[..., i] ** k
        out += term
    return out


def poly_substitute(p: Mapping, M: np.ndarray) -> Poly:
    """Return the polynomial ``v -> p(M v)``."""
    M = np.asarray(M)
    n_out, n_in = M.shape
    linear = []
    for i in range(n_out):
        lin = {}
        for j in range(n_in):
            if M[i, j] != 0:
                e = [0] * n_in
                e[j] = 1
                lin[tuple(e)] = complex(M[i, j])
        linear.append(lin)
    one = {(0,) * n_in: 1.0}
    powers: dict[tuple[int, int], Poly] = {}

    def power(i: int, k: int) -> Poly:
        if k == 0:
            return one
        if (i, k) not in powers:
            powers[(i, k)] = poly_mul(power(i, k - 1), linear[i])
        return powers[(i, k)]

    out: Poly = {}
    for e, v in p.items():
        term: Poly = {(0,) * n_in: v}
        for i, k in enumerate(e):
            if k:
                term = poly_mul(term, power(i, k))
        out = poly_add(out, term)
    return out


@dataclass(frozen=True, eq=False)
class GaussTerm:
    poly: Mapping
    u0: np.ndarray
    A: np.ndarray
    b: np.ndarray
    c: complex = 0.0

    def key(self):
        return (self.u0.tobytes(), self.A.tobytes(), self.b.tobytes(), complex(self.c))

    def __call__(self, u: np.ndarray) -> np.ndarray:
        y = np.asarray(u, dtype=float) - self.u0
        quad = np.einsum("...i,ij,...j->...", y, self.A, y)
        return poly_eval(self.poly, y) * np.exp(-quad + y @ self.b + self.c)


class PolyGauss:
    """Sum of :class:`GaussTerm` objects in ``nvars`` real variables."""

    def __init__(self, nvars: int, terms=()):
        self.nvars = nvars
        merged: dict = {}
        for t in terms:
            if not t.poly:
                continue
            k = t.key()
            if k in merged:
                old = merged[k]
                merged[k] = GaussTerm(poly_add(old.poly, t.poly), old.u0, old.A, old.b, old.c)
            else:
                merged[k] = t
        self.terms = tuple(t for t in merged.values() if t.poly)

    @classmethod
    def gaussian(cls, A, u0=None, b=None, c=0.0, poly=None) -> "PolyGauss":
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        n = A.shape[0]
        u0 = np.zeros(n) if u0 is None else np.asarray(u0, dtype=float)
        b = np.zeros(n, dtype=complex) if b is None else np.asarray(b, dtype=complex)
        poly = {(0,) * n: 1.0} if poly is None else dict(poly)
        return cls(n, [GaussTerm(poly, u0, 0.5 * (A + A.T), b, complex(c))])

    @classmethod
    def zero(cls, nvars: int) -> "PolyGauss":
        return cls(nvars, [])

    def __call__(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        out = np.zeros(u.shape[:-1], dtype=complex)
        for t in self.terms:
            out += t(u)
        return out

    def __add__(self, other: "PolyGauss") -> "PolyGauss":
        return PolyGauss(self.nvars, self.terms + other.terms)

    def __sub__(self, other: "PolyGauss") -> "PolyGauss":
        return self + (-1.0) * other

    def __mul__(self, s: complex) -> "PolyGauss":
        return PolyGauss(
            self.nvars, [GaussTerm(poly_scale(t.poly, s), t.u0, t.A, t.b, t.c) for t in self.terms]
        )

    __rmul__ = __mul__

    def __neg__(self) -> "PolyGauss":
        return (-1.0) * self

    def __repr__(self) -> str:
        return f"PolyGauss(nvars={self.nvars}, nterms={len(self.terms)})"

    def diff(self, i: int) -> "PolyGauss":
        out = []
        for t in self.terms:
            # d/dy_i exponent = -2 (A y)_i + b_i
            p = poly_diff(t.poly, i)
            p = poly_add(p, t.poly, t.b[i])
            for j in range(self.nvars):
                if t.A[i, j] != 0:
                    p = poly_add(p, poly_mulvar(t.poly, j), -2.0 * t.A[i, j])
            out.append(GaussTerm(p, t.u0, t.A, t.b, t.c))
        return PolyGauss(self.nvars, out)

    def mulvar(self, i: int) -> "PolyGauss":
        """Multiply by the coordinate ``u_i``."""
        out = []
        for t in self.terms:
            p = poly_mulvar(t.poly, i)
            if t.u0[i] != 0:
                p = poly_add(p, t.poly, t.u0[i])
            out.append(GaussTerm(p, t.u0, t.A, t.b, t.c))
        return PolyGauss(self.nvars, out)

    def plane_wave(self, kappa) -> "PolyGauss":
        """Multiply by ``exp(i kappa . u)``."""
        kappa = np.asarray(kappa, dtype=float)
        return PolyGauss(
            self.nvars,
            [
                GaussTerm(t.poly, t.u0, t.A, t.b + 1j * kappa, t.c + 1j * float(kappa @ t.u0))
                for t in self.terms
            ],
        )

    def substitute(self, M) -> "PolyGauss":
        """Return ``v -> self(M v)`` for invertible ``M``."""
        M = np.asarray(M, dtype=float)
        Minv = np.linalg.inv(M)
        out = []
        for t in self.terms:
            out.append(
                GaussTerm(
                    poly_substitute(t.poly, M),
                    Minv @ t.u0,
                    M.T @ t.A @ M,
                    M.T @ t.b,
                    t.c,
                )
            )
        return PolyGauss(self.nvars, out)

    def embed(self, index, nvars: int) -> "PolyGauss":
        """View as a function of ``nvars`` variables, own variables at ``index``."""
        index = list(index)
        out = []
        for t in self.terms:
            poly = {}
            for e, v in t.poly.items():
                f = [0] * nvars
                for k, j in zip(e, index):
                    f[j] = k
                poly[tuple(f)] = v
            u0 = np.zeros(nvars)
            u0[index] = t.u0
            A = np.zeros((nvars, nvars), dtype=complex)
            A[np.ix_(index, index)] = t.A
            b = np.zeros(nvars, dtype=complex)
            b[index] = t.b
            out.append(GaussTerm(poly, u0, A, b, t.c))
        return PolyGauss(nvars, out)

    def degree(self) -> int:
        return max((poly_degree(t.poly) for t in self.terms), default=0)


def tensor(f: PolyGauss, g: PolyGauss) -> PolyGauss:
    """Product ``f(u) g(w)`` as a function of ``(u, w)``."""
    n, m = f.nvars, g.nvars
    out = []
    for s in f.terms:
        for t in g.terms:
            poly = {}
            for (e1, v1), (e2, v2) in product(s.poly.items(), t.poly.items()):
                poly[e1 + e2] = poly.get(e1 + e2, 0.0) + v1 * v2
            A = np.zeros((n + m, n + m), dtype=complex)
            A[:n, :n] = s.A
            A[n:, n:] = t.A
            out.append(
                GaussTerm(
                    poly,
                    np.concatenate([s.u0, t.u0]),
                    A,
                    np.concatenate([s.b, t.b]),
                    s.c + t.c,
                )
            )
    return PolyGauss(n + m, out)


def poly_shift(p: Mapping, u0) -> Poly:
    """Return the polynomial ``u -> p(u - u0)``."""
    from math import comb

    u0 = np.asarray(u0, dtype=float)
    out: Poly = {}
    for e, v in p.items():
        term: Poly = {(0,) * len(e): v}
        for i, k in enumerate(e):
            if k == 0:
                continue
            factor = {}
            for j in range(k + 1):
                f = [0] * len(e)
                f[i] = j
                factor[tuple(f)] = comb(k, j) * (-u0[i]) ** (k - j)
            term = poly_mul(term, factor)
        out = poly_add(out, term)
    return out


def recenter(f: PolyGauss) -> PolyGauss:
    """Same function with every term written around the origin."""
    out = []
    for t in f.terms:
        if not np.any(t.u0):
            out.append(t)
            continue
        u0 = t.u0
        out.append(
            GaussTerm(
                poly_shift(t.poly, u0),
                np.zeros_like(u0),
                t.A,
                2 * t.A @ u0 + t.b,
                t.c - u0 @ t.A @ u0 - t.b @ u0,
            )
        )
    return PolyGauss(f.nvars, out)


def conj(f: PolyGauss) -> PolyGauss:
    return PolyGauss(
        f.nvars,
        [
            GaussTerm({e: np.conj(v) for e, v in t.poly.items()}, t.u0, t.A.conj(), t.b.conj(), np.conj(t.c))
            for t in f.terms
        ],
    )


def multiply(f: PolyGauss, g: PolyGauss) -> PolyGauss:
    """Pointwise product."""
    f, g = recenter(f), recenter(g)
    out = []
    for s in f.terms:
        for t in g.terms:
            out.append(GaussTerm(poly_mul(s.poly, t.poly), s.u0, s.A + t.A, s.b + t.b, s.c + t.c))
    return PolyGauss(f.nvars, out)


def fourier_last(f: PolyGauss, xi: float = 0.0) -> PolyGauss:
    """int exp(-i v xi) f(w, v) dv over the last variable, in closed form.

    With ``xi = 0`` this integrates the last variable out.
    """
    n = f.nvars
    out = []
    for t in f.terms:
        A = t.A
        alpha = A[n - 1, n - 1]
        if not alpha.real > 0:
            raise ValueError("term is not integrable in the last variable")
        Avw = A[n - 1, : n - 1]
        beta0 = t.b[n - 1] - 1j * xi
        v0 = t.u0[n - 1]
        # beta(y_w) = beta0 - 2 Avw . y_w as a polynomial in y_w
        beta = {(0,) * (n - 1): beta0}
        for j in range(n - 1):
            if Avw[j] != 0:
                e = [0] * (n - 1)
                e[j] = 1
                beta[tuple(e)] = -2.0 * Avw[j]
        # Gaussian moments M_j(beta): M_{j+1} = beta/(2 alpha) M_j + j/(2 alpha) M_{j-1}
        jmax = max((e[n - 1] for e in t.poly), default=0)
        moments = [{(0,) * (n - 1): 1.0}]
        if jmax >= 1:
            moments.append(poly_scale(beta, 1 / (2 * alpha)))
        for j in range(1, jmax):
            nxt = poly_add(
                poly_scale(poly_mul(beta, moments[j]), 1 / (2 * alpha)),
                moments[j - 1],
                j / (2 * alpha),
            )
            moments.append(nxt)
        poly: Poly = {}
        for e, v in t.poly.items():
            poly = poly_add(poly, poly_mul({e[: n - 1]: v}, moments[e[n - 1]]))
        A_new = A[: n - 1, : n - 1] - np.outer(Avw, Avw) / alpha
        b_new = t.b[: n - 1] - beta0 * Avw / alpha
        c_new = t.c - 1j * xi * v0 + beta0**2 / (4 * alpha) + 0.5 * np.log(np.pi / alpha)
        out.append(GaussTerm(poly, t.u0[: n - 1].copy(), A_new, b_new, c_new))
    return PolyGauss(n - 1, out)


def integrate(f: PolyGauss) -> complex:
    """Integral over all of R^n."""
    g = f
    while g.nvars > 0:
        g = fourier_last(g)
    return complex(sum(t.poly.get((), 0.0) * np.exp(t.c) for t in g.terms))
