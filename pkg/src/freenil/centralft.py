"""Partial Fourier transform in the central variables and its inversion.

Conventions: ``f^mu(x) = int exp(-i mu.z) f(x, z) dz``; the inverse carries
``(2 pi)^{-3}`` and the one-dimensional fiber inverse carries ``(2 pi)^{-1}``.

The analytic family is

    f(x, z) = sum_j c_j P_j(x - x0_j) exp(-a_j |x - x0_j|^2) exp(-b_j |z - z0_j|^2),

on which every transform used downstream is available in closed form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .nilgeom import AdaptedFrame, GroupPoint, adapted_frame, Direction
from .polygauss import PolyGauss, fourier_last, tensor
from .quadrature import QuadratureSpec, gauss_legendre
from .twisted import GridFn2D

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Term:
    coef: complex
    poly: tuple  # ((e1, e2, e3), value) pairs, total degree <= 4
    a: float
    b: float
    x0: tuple = (0.0, 0.0, 0.0)
    z0: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Gaussian widths must be positive")
        poly = tuple((tuple(int(i) for i in e), complex(v)) for e, v in self.poly)
        for e, _ in poly:
            if len(e) != 3 or min(e) < 0:
                raise ValueError(f"bad exponent {e}")
            if sum(e) > 4:
                raise ValueError("polynomial degree exceeds 4")
        object.__setattr__(self, "poly", poly)
        object.__setattr__(self, "coef", complex(self.coef))
        object.__setattr__(self, "x0", tuple(float(v) for v in self.x0))
        object.__setattr__(self, "z0", tuple(float(v) for v in self.z0))

    def x_part(self) -> PolyGauss:
        return PolyGauss.gaussian(self.a * np.eye(3), u0=self.x0, poly=dict(self.poly))

    def z_part(self) -> PolyGauss:
        return PolyGauss.gaussian(self.b * np.eye(3), u0=self.z0)

    def z_hat(self, mu) -> np.ndarray:
        """Fourier transform of the central factor at ``mu`` (shape (..., 3))."""
        mu = np.asarray(mu, dtype=float)
        q = np.sum(mu * mu, axis=-1)
        return (np.pi / self.b) ** 1.5 * np.exp(-q / (4 * self.b) - 1j * (mu @ np.asarray(self.z0)))


@dataclass(frozen=True)
class AnalyticFn:
    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    # construction -----------------------------------------------------
    @classmethod
    def gaussian(cls, a: float = 1.0, b: float = 1.0, coef: complex = 1.0, poly=None, x0=(0, 0, 0), z0=(0, 0, 0)):
        poly = (((0, 0, 0), 1.0),) if poly is None else tuple(dict(poly).items())
        return cls((Term(coef, poly, a, b, x0, z0),))

    @classmethod
    def zero(cls) -> "AnalyticFn":
        return cls(())

    def __add__(self, other: "AnalyticFn") -> "AnalyticFn":
        return AnalyticFn(self.terms + other.terms)

    def __mul__(self, s: complex) -> "AnalyticFn":
        return AnalyticFn(tuple(Term(s * t.coef, t.poly, t.a, t.b, t.x0, t.z0) for t in self.terms))

    __rmul__ = __mul__

    # evaluation -------------------------------------------------------
    def to_polygauss(self) -> PolyGauss:
        """Six-variable closed form in (x, z)."""
        out = PolyGauss.zero(6)
        for t in self.terms:
            out = out + tensor(t.x_part(), t.z_part()) * t.coef
        return out

    def __call__(self, x, z) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        z = np.asarray(z, dtype=float)
        x, z = np.broadcast_arrays(x, z)
        return self.to_polygauss()(np.concatenate([x, z], axis=-1))

    def at(self, p: GroupPoint) -> complex:
        return complex(self(p.x, p.z))

    def is_radial(self) -> bool:
        """Invariant under every rotation acting on x and z simultaneously."""
        for t in self.terms:
            if any(t.x0) or any(t.z0):
                return False
            if any(e != (0, 0, 0) for e, v in t.poly if v != 0):
                return False
        return True

    def dilate(self, eps: float) -> "AnalyticFn":
        """f o delta_eps, i.e. (x, z) -> f(eps x, eps^2 z)."""
        if not eps > 0:
            raise ValueError("dilation parameter must be positive")
        out = []
        for t in self.terms:
            poly = tuple((e, v * eps ** sum(e)) for e, v in t.poly)
            out.append(
                Term(t.coef, poly, t.a * eps**2, t.b * eps**4,
                     tuple(np.asarray(t.x0) / eps), tuple(np.asarray(t.z0) / eps**2))
            )
        return AnalyticFn(tuple(out))

    # serialization ----------------------------------------------------
    def to_json(self) -> str:
        doc = {
            "schema": "freenil.analytic",
            "version": SCHEMA_VERSION,
            "terms": [
                {
                    "coef": {"re": t.coef.real, "im": t.coef.imag},
                    "poly": [
                        {"exponents": list(e), "re": complex(v).real, "im": complex(v).imag}
                        for e, v in t.poly
                    ],
                    "a": t.a,
                    "b": t.b,
                    "x0": list(t.x0),
                    "z0": list(t.z0),
                }
                for t in self.terms
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str | dict) -> "AnalyticFn":
        doc = json.loads(text) if isinstance(text, str) else text
        if doc.get("schema") != "freenil.analytic":
            raise ValueError("not an analytic-function document")
        if doc.get("version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {doc.get('version')!r}")
        terms = []
        for t in doc["terms"]:
            poly = tuple((tuple(m["exponents"]), complex(m["re"], m.get("im", 0.0))) for m in t["poly"])
            terms.append(
                Term(complex(t["coef"]["re"], t["coef"].get("im", 0.0)), poly, float(t["a"]), float(t["b"]),
                     tuple(t.get("x0", (0, 0, 0))), tuple(t.get("z0", (0, 0, 0))))
            )
        return cls(tuple(terms))

    # transforms -------------------------------------------------------
    def central_transform(self, mu) -> "CentralSlice":
        return central_transform(self, mu)


@dataclass(frozen=True)
class CentralSlice:
    """f^mu as a closed-form function of x (or of adapted coordinates after rotation)."""

    mu: np.ndarray
    values: PolyGauss = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        return self.values(x)


def central_transform(f: AnalyticFn, mu) -> CentralSlice:
    mu = np.asarray(mu, dtype=float).reshape(3)
    out = PolyGauss.zero(3)
    for t in f.terms:
        out = out + t.x_part() * (t.coef * complex(t.z_hat(mu)))
    return CentralSlice(mu, out)


def central_transform_values(f: AnalyticFn, mu, x) -> np.ndarray:
    """f^mu(x), vectorized over leading axes of ``mu`` and ``x`` (broadcast)."""
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    out = 0
    for t in f.terms:
        out = out + t.coef * t.z_hat(mu) * t.x_part()(x)
    return out


def central_transform_sampled(values: np.ndarray, half_width: float, mu) -> complex:
    """Grid fallback: trapezoid sum of exp(-i mu.z) f over a periodic cube.

    ``values`` holds f(x, .) at a fixed x on the node grid ``-L + j h``.
    Spectrally accurate for integrands that decay to roundoff at the box edge.
    """
    values = np.asarray(values)
    n = values.shape[0]
    if values.shape != (n, n, n):
        raise ValueError("expected an n^3 sample cube")
    h = 2 * half_width / n
    ax = -half_width + h * np.arange(n)
    mu = np.asarray(mu, dtype=float)
    e = [np.exp(-1j * mu[i] * ax) for i in range(3)]
    return complex(np.einsum("ijk,i,j,k->", values, e[0], e[1], e[2]) * h**3)


def radial_cutoff(f: AnalyticFn, tol: float = 1e-12) -> float:
    """rho beyond which |f^mu| has Gaussian tail below ``tol`` for every term."""
    if not f.terms:
        return 1.0
    bmax = max(t.b for t in f.terms)
    return 2 * np.sqrt(bmax * np.log(1 / tol))


def invert_spherical(slices, p: GroupPoint, quad: QuadratureSpec, rho_max: float) -> complex:
    """(2 pi)^{-3} int_S int_0^R exp(i rho omega.z) f^{rho omega}(x) rho^2 d rho d omega.

    ``slices(mu, x)`` returns f^mu(x) vectorized over mu of shape (..., 3).
    """
    if not rho_max > 0:
        raise ValueError("rho_max must be positive")
    rho, wr = gauss_legendre(quad.rho_nodes, 0.0, rho_max)
    om, wo = quad.sphere_nodes, quad.sphere_weights
    mu = rho[:, None, None] * om[None, :, :]
    vals = slices(mu, p.x)
    phase = np.exp(1j * (mu @ p.z))
    w = (wr * rho**2)[:, None] * wo[None, :]
    return complex(np.sum(w * phase * vals) / (2 * np.pi) ** 3)


def invert_analytic(f: AnalyticFn, p: GroupPoint, quad: QuadratureSpec) -> complex:
    return invert_spherical(lambda mu, x: central_transform_values(f, mu, x), p, quad, radial_cutoff(f))


def rotate_slice(s: CentralSlice, frame: AdaptedFrame) -> PolyGauss:
    """g(x_w, y_w, v) = f^mu(R^T (x_w, y_w, v)); exact on the analytic family."""
    return s.values.substitute(frame.R.T)


def from_rotated(g: PolyGauss, frame: AdaptedFrame, x) -> np.ndarray:
    """Evaluate a rotated slice back at first-layer points x."""
    return g(np.asarray(x, dtype=float) @ frame.R.T)


def fiber_fourier_closed(g: PolyGauss, xi: float) -> PolyGauss:
    """int exp(-i v xi) g(x_w, y_w, v) dv as a closed form in (x_w, y_w)."""
    return fourier_last(g, xi)


def fiber_fourier(g: PolyGauss, xi: float, n: int = 128, half_width: float | None = None) -> GridFn2D:
    """Fiber transform sampled on a node-centred grid."""
    h2 = fourier_last(g, xi)
    L = 8.0 if half_width is None else half_width
    return GridFn2D.from_function(lambda s, t: h2(np.stack([s, t], axis=-1)), n, L)
