"""Lie-algebra geometry of the free two-step nilpotent algebra on three generators.

Both layers are R^3.  The bracket of two first-layer vectors is their cross
product, landing in the center.  For a unit covector ``omega`` on the center the
adapted frame is ``{V, X, Y}`` with ``V = omega`` spanning the radical of
``(X, Y) -> omega([X, Y])`` and ``Y = V x X``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class GroupPoint:
    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float).reshape(3))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float).reshape(3))
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.z))):
            raise ValueError("group point coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @classmethod
    def from_array(cls, u) -> "GroupPoint":
        u = np.asarray(u, dtype=float)
        return cls(u[:3], u[3:])


@dataclass(frozen=True)
class Direction:
    omega: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float).reshape(3)
        if abs(np.linalg.norm(w) - 1.0) > UNIT_TOL:
            raise ValueError(f"direction must be a unit vector, |omega| = {np.linalg.norm(w)!r}")
        object.__setattr__(self, "omega", w)

    @classmethod
    def normalized(cls, w) -> "Direction":
        w = np.asarray(w, dtype=float)
        return cls(w / np.linalg.norm(w))


@dataclass(frozen=True)
class AdaptedFrame:
    V: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    R: np.ndarray
    Zc: np.ndarray
    W1: np.ndarray
    W2: np.ndarray


def bracket(X, Y) -> np.ndarray:
    """[X, Y] in the center; [e1, e2] = Z3, [e2, e3] = Z1, [e3, e1] = Z2."""
    return np.cross(np.asarray(X, dtype=float), np.asarray(Y, dtype=float))


def omega_pairing(omega: Direction, X, Y) -> float:
    return float(omega.omega @ bracket(X, Y))


def radical_direction(omega: Direction) -> np.ndarray:
    # omega([X, Y]) = det(omega, X, Y) vanishes for all Y iff X is parallel to omega
    return omega.omega.copy()


def _reference_orthonormal(v: np.ndarray) -> np.ndarray:
    e = np.array([1.0, 0.0, 0.0]) if abs(v[0]) <= 0.9 else np.array([0.0, 1.0, 0.0])
    u = e - (e @ v) * v
    return u / np.linalg.norm(u)


def adapted_frame(omega: Direction, gauge: float = 0.0) -> AdaptedFrame:
    """Deterministic adapted frame; ``gauge`` rotates (X, Y) in their plane."""
    V = radical_direction(omega)
    X = _reference_orthonormal(V)
    Y = np.cross(V, X)
    if gauge:
        c, s = np.cos(gauge), np.sin(gauge)
        X, Y = c * X + s * Y, -s * X + c * Y
    R = np.vstack([X, Y, V])
    # rotations act on the center by the same matrix: (w1, w2, z_omega) = R z
    return AdaptedFrame(V=V, X=X, Y=Y, R=R, Zc=V.copy(), W1=X.copy(), W2=Y.copy())


def center_rotation(R: np.ndarray) -> np.ndarray:
    """Action on the center of the automorphism extending ``R`` on the first layer."""
    # the cofactor matrix det(R) R^{-T} satisfies Ru x Rw = cof(R)(u x w)
    return np.linalg.det(R) * np.linalg.inv(R).T


def dilate(p: GroupPoint, eps: float) -> GroupPoint:
    if not eps > 0:
        raise ValueError("dilation parameter must be positive")
    return GroupPoint(eps * p.x, eps**2 * p.z)


def to_adapted(omega: Direction, p: GroupPoint, frame: AdaptedFrame | None = None) -> np.ndarray:
    """Coordinates (v, x_w, y_w, z_w, w1, w2) adapted to ``omega``."""
    f = adapted_frame(omega) if frame is None else frame
    return np.array(
        [f.V @ p.x, f.X @ p.x, f.Y @ p.x, f.Zc @ p.z, f.W1 @ p.z, f.W2 @ p.z]
    )


def from_adapted(omega: Direction, coords, frame: AdaptedFrame | None = None) -> GroupPoint:
    f = adapted_frame(omega) if frame is None else frame
    v, xw, yw, zw, w1, w2 = np.asarray(coords, dtype=float)
    return GroupPoint(v * f.V + xw * f.X + yw * f.Y, zw * f.Zc + w1 * f.W1 + w2 * f.W2)


def fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform unit vectors, shape (n, 3)."""
    i = np.arange(n) + 0.5
    phi = np.arccos(1 - 2 * i / n)
    theta = np.pi * (1 + 5**0.5) * i
    return np.stack(
        [np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], axis=-1
    )
