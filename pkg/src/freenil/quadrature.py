"""Quadrature rules shared by the inversion and the spectral projector."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SPHERE_AREA = 4 * np.pi


def gauss_legendre(n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


def sphere_rule(n_theta: int, n_phi: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in cos(theta) times uniform azimuth; weights sum to 4 pi."""
    if n_theta < 1 or n_phi < 1:
        raise ValueError("sphere rule needs positive node counts")
    c, wc = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    st = np.sqrt(1 - c * c)
    nodes = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(c, n_phi),
        ],
        axis=-1,
    )
    weights = np.repeat(wc, n_phi) * (2 * np.pi / n_phi)
    return nodes, weights


@dataclass(frozen=True)
class QuadratureSpec:
    """Discretization of the omega, xi, k and mu integrals.

    ``mu_nodes``/``mu_weights`` may be empty when only single-mu projections
    are needed.  ``rho_nodes`` is the radial node count used by the central
    inversion.
    """

    n_theta: int = 16
    n_phi: int = 32
    xi_nodes: int = 33
    k_max: int = 32
    mu_nodes: tuple = ()
    mu_weights: tuple = ()
    rho_nodes: int = 64
    gauge: float = 0.0
    sphere_nodes: np.ndarray = field(init=False, repr=False, compare=False)
    sphere_weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("n_theta", "n_phi", "xi_nodes", "rho_nodes"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValueError(f"{name} must be a positive integer")
        if not isinstance(self.k_max, (int, np.integer)) or self.k_max < 0:
            raise ValueError("k_max must be a non-negative integer")
        if len(self.mu_nodes) != len(self.mu_weights):
            raise ValueError("mu_nodes and mu_weights differ in length")
        if any(not m > 0 for m in self.mu_nodes):
            raise ValueError("mu nodes must be positive")
        if any(not w > 0 for w in self.mu_weights):
            raise ValueError("mu weights must be positive")
        object.__setattr__(self, "mu_nodes", tuple(float(m) for m in self.mu_nodes))
        object.__setattr__(self, "mu_weights", tuple(float(w) for w in self.mu_weights))
        nodes, weights = sphere_rule(self.n_theta, self.n_phi)
        if abs(weights.sum() - SPHERE_AREA) > 1e-12:
            raise ValueError("sphere weights do not sum to 4 pi")
        object.__setattr__(self, "sphere_nodes", nodes)
        object.__setattr__(self, "sphere_weights", weights)

    @classmethod
    def with_mu_range(cls, mu_min: float, mu_max: float, n_mu: int = 48, **kw) -> "QuadratureSpec":
        if not 0 <= mu_min < mu_max:
            raise ValueError("need 0 <= mu_min < mu_max")
        m, w = gauss_legendre(n_mu, mu_min, mu_max)
        return cls(mu_nodes=tuple(m), mu_weights=tuple(w), **kw)

    def xi_rule(self, mu: float) -> tuple[np.ndarray, np.ndarray]:
        r = np.sqrt(mu)
        return gauss_legendre(self.xi_nodes, -r, r)

    def to_dict(self) -> dict:
        return {
            "n_theta": int(self.n_theta),
            "n_phi": int(self.n_phi),
            "xi_nodes": int(self.xi_nodes),
            "k_max": int(self.k_max),
            "mu_nodes": list(self.mu_nodes),
            "mu_weights": list(self.mu_weights),
            "rho_nodes": int(self.rho_nodes),
            "gauge": float(self.gauge),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuadratureSpec":
        known = {"n_theta", "n_phi", "xi_nodes", "k_max", "mu_nodes", "mu_weights", "rho_nodes", "gauge"}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown quadrature fields: {sorted(extra)}")
        d = dict(d)
        for key in ("mu_nodes", "mu_weights"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)
