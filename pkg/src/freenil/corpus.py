"""Deterministic test-function corpora."""

from __future__ import annotations

import numpy as np

from .centralft import AnalyticFn, Term
from .nilgeom import GroupPoint
from .twisted import GridFn2D


def _random_poly(rng, nvars: int, max_deg: int, n_terms: int) -> dict:
    out = {}
    for _ in range(n_terms):
        e = [0] * nvars
        for _ in range(int(rng.integers(0, max_deg + 1))):
            e[int(rng.integers(0, nvars))] += 1
        out[tuple(e)] = out.get(tuple(e), 0.0) + complex(rng.normal(), rng.normal())
    return out


def analytic_corpus(seed: int = 0, size: int = 6) -> list[AnalyticFn]:
    """Shifted polynomial x Gaussian terms of degree <= 4 (one or two terms each)."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        terms = []
        for _ in range(int(rng.integers(1, 3))):
            poly = tuple(_random_poly(rng, 3, 4, 3).items())
            terms.append(
                Term(complex(rng.normal(), rng.normal()), poly, float(rng.uniform(0.4, 1.5)),
                     float(rng.uniform(0.4, 1.5)), tuple(rng.uniform(-0.5, 0.5, 3)), tuple(rng.uniform(-0.5, 0.5, 3)))
            )
        out.append(AnalyticFn(tuple(terms)))
    return out


def centred_corpus(seed: int = 0, size: int = 3) -> list[AnalyticFn]:
    """Terms centred in x (what the spectral projector accepts), with z-shifts and polynomials."""
    rng = np.random.default_rng(seed)
    out = [AnalyticFn.gaussian()]
    for _ in range(size - 1):
        poly = tuple(_random_poly(rng, 3, 3, 3).items())
        out.append(
            AnalyticFn((Term(1.0, poly, float(rng.uniform(0.6, 1.4)), float(rng.uniform(0.6, 1.4)),
                             (0, 0, 0), tuple(rng.uniform(-0.3, 0.3, 3))),))
        )
    return out


def gaussian_tensor_corpus() -> list[AnalyticFn]:
    return [
        AnalyticFn.gaussian(),
        AnalyticFn.gaussian(a=0.7, b=1.3),
        AnalyticFn.gaussian(a=1.5, b=0.8) + AnalyticFn.gaussian(a=0.5, b=2.0, coef=-0.25),
    ]


def random_points(seed: int, n: int, radius: float = 1.0) -> list[GroupPoint]:
    rng = np.random.default_rng(seed)
    return [GroupPoint(rng.uniform(-radius, radius, 3), rng.uniform(-radius, radius, 3)) for _ in range(n)]


def twisted_corpus(lam: float, n: int, half_width: float, seed: int = 0, size: int = 20, offset: float = 0.0) -> list[GridFn2D]:
    """Polynomial x Gaussian functions in the plane, decayed well inside the box."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        poly = _random_poly(rng, 2, 3, 3)
        a = float(rng.uniform(0.3, 0.8)) * lam
        c = rng.uniform(-0.5, 0.5, 2) / np.sqrt(lam)

        def fn(s, t, poly=poly, a=a, c=c):
            ys, yt = s - c[0], t - c[1]
            val = sum(v * ys ** e[0] * yt ** e[1] for e, v in poly.items())
            return val * np.exp(-a * (ys * ys + yt * yt))

        out.append(GridFn2D.from_function(fn, n, half_width, offset))
    return out
