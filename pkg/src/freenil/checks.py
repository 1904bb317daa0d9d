"""Invariant checks shared by the ``validate`` command and the acceptance tests.

Every check returns :class:`Check` rows carrying a descriptive tag, the measured
residual, the tolerance and a status (``pass``, ``fail`` or ``skipped``).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import centralft as cft
from . import fieldops as fo
from . import normharness as nh
from . import oracle as orc
from . import projector as pj
from . import twisted as tw
from .corpus import analytic_corpus, centred_corpus, gaussian_tensor_corpus, random_points, twisted_corpus
from .nilgeom import Direction, GroupPoint, adapted_frame, bracket, center_rotation, fibonacci_sphere
from .polygauss import PolyGauss, conj, fourier_last, integrate, multiply
from .quadrature import QuadratureSpec, gauss_legendre


@dataclass
class Check:
    name: str
    tag: str
    measured: float
    tolerance: float
    status: str = ""
    detail: str = ""

    def __post_init__(self):
        if not self.status:
            ok = np.isfinite(self.measured) and self.measured <= self.tolerance
            self.status = "pass" if ok else "fail"
        self.measured = float(self.measured)
        self.tolerance = float(self.tolerance)

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "skipped")

    def as_dict(self) -> dict:
        d = asdict(self)
        for k in ("measured", "tolerance"):
            if not np.isfinite(d[k]):
                d[k] = repr(d[k])  # strict JSON has no inf/nan
        return d


def _worst(values) -> float:
    vals = [float(v) for v in values]
    return max(vals) if vals else 0.0


SUITES = ("structure", "operators", "twisted", "oracle", "central", "spectral", "exponents")


@dataclass(frozen=True)
class ValidateConfig:
    seed: int = 0
    suites: tuple = SUITES
    lams: tuple = (0.5, 1.0, 2.0)
    grid: int = 128
    k_levels: int = 8
    k_max: int | None = None
    oracle_n: int = 64
    oracle_corpus: int = 20
    mus: tuple = (0.5, 1.0, 4.0)
    n_points: int = 8
    reconstruct: bool = True
    reconstruct_points: int = 16

    def __post_init__(self):
        bad = set(self.suites) - set(SUITES)
        if bad:
            raise ValueError(f"suites: unknown entries {sorted(bad)}")
        if self.k_max is not None and self.k_max < 0:
            raise ValueError("k_max: must be >= 0")
        if any(not l > 0 for l in self.lams):
            raise ValueError("lams: must be positive")
        if any(not m > 0 for m in self.mus):
            raise ValueError("mus: must be positive")
        if self.k_levels < 0:
            raise ValueError("k_levels: must be >= 0")
        if self.grid < 32 or self.grid & (self.grid - 1):
            raise ValueError("grid: must be a power of two >= 32")
        if self.oracle_n * self.oracle_n > orc.DENSE_BUDGET:
            raise ValueError("oracle_n: exceeds the dense budget")


# ------------------------------------------------------------------ structure
def check_structure(cfg: ValidateConfig) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    e = np.eye(3)
    table = [(0, 1, 2), (1, 2, 0), (2, 0, 1)]
    basis = _worst(np.max(np.abs(bracket(e[i], e[j]) - e[k])) for i, j, k in table)
    basis = max(basis, _worst(np.max(np.abs(bracket(e[i], e[i]))) for i in range(3)))
    u, w = rng.normal(size=(1000, 3)), rng.normal(size=(1000, 3))
    explicit = np.stack([u[:, 1] * w[:, 2] - u[:, 2] * w[:, 1], u[:, 2] * w[:, 0] - u[:, 0] * w[:, 2],
                         u[:, 0] * w[:, 1] - u[:, 1] * w[:, 0]], -1)
    rnd = np.max(np.abs(bracket(u, w) - explicit))
    v = rng.normal(size=(1000, 3))
    jac = np.max(np.abs(bracket(u, bracket(w, v)) + bracket(w, bracket(v, u)) + bracket(v, bracket(u, w))))
    out = [
        Check("bracket on basis", "structure-constants", basis, 0.0),
        Check("bracket vs coordinate cross product", "structure-constants", rnd, 1e-12),
        Check("Jacobi identity", "structure-constants", jac, 1e-12),
    ]
    errs = {"orthonormal": [], "pairing": [], "det": [], "automorphism": []}
    for om in fibonacci_sphere(100):
        d = Direction.normalized(om)
        f = adapted_frame(d)
        R = f.R
        errs["orthonormal"].append(np.max(np.abs(R @ R.T - np.eye(3))))
        errs["pairing"].append(abs(d.omega @ bracket(f.X, f.Y) - 1))
        errs["det"].append(abs(np.linalg.det(R) - 1))
        a, b = rng.normal(size=3), rng.normal(size=3)
        errs["automorphism"].append(np.max(np.abs(center_rotation(R) @ bracket(a, b) - bracket(R @ a, R @ b)))
                                    + np.max(np.abs(center_rotation(R) - R)))
    for k, v in errs.items():
        out.append(Check(f"adapted frame {k}", "adapted-frame", _worst(v), 1e-12))
    return out


# ------------------------------------------------------------------ operators
def check_operators(cfg: ValidateConfig) -> list[Check]:
    corpus = analytic_corpus(cfg.seed, 4)
    pts = random_points(cfg.seed + 1, 20)
    U = np.array([p.as_array() for p in pts])
    expand, fib, homog, inter, conjr = [], [], [], [], []
    dirs = [Direction.normalized(w) for w in fibonacci_sphere(10)]
    for f in corpus:
        F = f.to_polygauss()
        scale = max(np.max(np.abs(fo.sublaplacian_composed(F)(U))), 1.0)
        expand.append(np.max(np.abs(fo.sublaplacian_expanded(F)(U) - fo.sublaplacian_composed(F)(U))) / scale)
        LF = fo.sublaplacian_expanded(F)
        for eps in (0.5, 2.0, 3.0):
            near = [GroupPoint(p.x / eps, p.z / eps**2) for p in pts[:5]]
            ref = max(abs(eps**2 * LF(p.as_array())) for p in pts[:5])
            homog.append(max(fo.homogeneity_residual(F, eps, q) for q in near) / ref)
        g = sum((t.x_part() * t.coef for t in f.terms[1:]), f.terms[0].x_part() * f.terms[0].coef)
        X = U[:, :3]
        for rho in (0.5, 1.0, 2.0):
            for d in dirs:
                fp = fo.FiberParams(rho, d)
                ref = max(np.max(np.abs(fo.fiber_sublaplacian_composed(fp, g)(X))), 1.0)
                fib.append(np.max(np.abs(fo.fiber_sublaplacian(fp, g)(X) - fo.fiber_sublaplacian_composed(fp, g)(X))) / ref)
                inter.append(max(fo.intertwining_residual(fp, g, p) for p in pts[::4]) / ref)
                conjr.append(fo.conjugation_residual(fp, g, X) / ref)
    return [
        Check("expanded sub-Laplacian vs sum of squares", "sublaplacian-expansion", _worst(expand), 1e-8),
        Check("expanded fiber operator vs sum of squares", "fiber-expansion", _worst(fib), 1e-8),
        Check("homogeneity under dilations", "homogeneity", _worst(homog), 1e-8),
        Check("intertwining with central characters", "intertwining", _worst(inter), 1e-8),
        Check("conjugation to twisted Laplacian", "conjugation", _worst(conjr), 1e-8),
    ]


# ------------------------------------------------------------------ twisted
def check_twisted(cfg: ValidateConfig) -> list[Check]:
    eig, idem, orth, comp, ground, ground_hi = [], [], [], [], [], []
    comp_note = "k_max override" if cfg.k_max is not None else "truncation rule"
    for lam in cfg.lams:
        L = tw.box_half_width(lam)
        g = twisted_corpus(lam, cfg.grid, L, cfg.seed, 1)[0]
        projs = [tw.lambda_project(g, tw.TwistParams(lam, k)) for k in range(cfg.k_levels + 1)]
        for k, pk in enumerate(projs):
            nrm = pk.norm()
            if nrm > 1e-12 * g.norm():
                r = tw.apply_twisted_laplacian(pk, lam) - pk * (lam * (2 * k + 1))
                eig.append(r.norm() / nrm)
        for k in sorted({0, min(3, cfg.k_levels)}):
            pk = projs[k]
            idem.append((tw.lambda_project(pk, tw.TwistParams(lam, k)) - pk).norm() / g.norm())
            orth.append((tw.lambda_project(pk, tw.TwistParams(lam, k + 1))).norm() / g.norm())
        K = cfg.k_max if cfg.k_max is not None else tw.truncation_order(lam, tw.effective_radius(g))
        try:
            comp.append((tw.partial_sum(g, lam, K) - g).norm() / g.norm())
        except ValueError:
            comp.append(np.inf)
            comp_note = f"k_max {K} beyond the grid-resolved level {tw.max_resolved_level(lam, g)}"
        g0 = tw.GridFn2D.from_function(lambda s, t: np.exp(-lam * (s * s + t * t) / 4), cfg.grid, L)
        ground.append((tw.lambda_project(g0, tw.TwistParams(lam, 0)) - g0).norm() / g0.norm())
        ground_hi.append(_worst(tw.lambda_project(g0, tw.TwistParams(lam, k)).norm() / g0.norm() for k in (1, 2, 5)))
    return [
        Check("eigen-relation of the level projections", "twisted-eigen", _worst(eig), 1e-6),
        Check("idempotence", "projection-idempotence", _worst(idem), 1e-8),
        Check("orthogonality of distinct levels", "projection-orthogonality", _worst(orth), 1e-8),
        Check("completeness", "completeness", _worst(comp), 1e-6, detail=comp_note),
        Check("ground state reproduced", "ground-state", _worst(ground), 1e-8),
        Check("ground state annihilated by higher levels", "ground-state", _worst(ground_hi), 1e-8),
    ]


# ------------------------------------------------------------------ oracle
def check_oracle(cfg: ValidateConfig) -> list[Check]:
    out = []
    clus, cmp = [], []
    n = cfg.oracle_n
    for lam in (1.0, 2.0):
        M = orc.discretize_twisted(lam, n, orc.oracle_box(lam, n))
        out.append(Check(f"Hermitian blocks (lam={lam})", "oracle-hermitian", M.hermitian_defect(), 1e-10))
        for k, (val, deg, _) in enumerate(orc.clusters(M, 9)):
            clus.append(abs(val / (lam * (2 * k + 1)) - 1) if deg else np.inf)
        corpus = twisted_corpus(lam, n, M.half_width, cfg.seed, cfg.oracle_corpus, offset=0.5)
        for i, g in enumerate(corpus):
            cmp.append(orc.compare_lambda_projection(lam, i % 4, g, M))
    out.append(Check("discrete clusters at lam(2k+1), k <= 8", "oracle-clusters", _worst(clus), 1e-3))
    out.append(Check("eigenspace vs kernel projection", "oracle-projection", _worst(cmp), 1e-4))
    return out


# ------------------------------------------------------------------ central
def _z_hat_quad(b: float, z0, mu) -> complex:
    from scipy.integrate import quad

    val = 1.0 + 0j
    for d in range(3):
        re = quad(lambda z: np.cos(mu[d] * z) * np.exp(-b * (z - z0[d]) ** 2), -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
        im = quad(lambda z: -np.sin(mu[d] * z) * np.exp(-b * (z - z0[d]) ** 2), -np.inf, np.inf, epsabs=1e-14, epsrel=1e-13)[0]
        val *= complex(re, im)
    return val


def check_central(cfg: ValidateConfig) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    corpus = analytic_corpus(cfg.seed, 3)
    closed = []
    for f in corpus:
        mu = rng.normal(size=3)
        x = rng.normal(size=3) * 0.7
        ref = sum(t.coef * _z_hat_quad(t.b, t.z0, mu) * complex(t.x_part()(x)) for t in f.terms)
        closed.append(abs(cft.central_transform(f, mu)(x) - ref) / max(abs(ref), 1e-300))
    quad = QuadratureSpec(n_theta=32, n_phi=64)
    inv = []
    for f in corpus[:2] + [cft.AnalyticFn.gaussian()]:
        for p in random_points(cfg.seed + 2, 10):
            inv.append(abs(cft.invert_analytic(f, p, quad) - f.at(p)))
    planch, commute = [], []
    xs, wx = gauss_legendre(400, -30, 30)
    for f in corpus[:2]:
        om = Direction.normalized(rng.normal(size=3))
        frame = adapted_frame(om)
        g = cft.rotate_slice(cft.central_transform(f, 0.8 * om.omega), frame)
        lhs = sum(w * integrate(multiply(fourier_last(g, x), conj(fourier_last(g, x)))) for x, w in zip(xs, wx))
        rhs = 2 * np.pi * integrate(multiply(g, conj(g)))
        planch.append(abs(lhs - rhs) / abs(rhs))
        commute.append(_commutation_residual(g, rho=1.0, k=2, xi=0.7))
    return [
        Check("central transform vs 1D quadrature", "central-transform", _worst(closed), 1e-10),
        Check("spherical inversion round trip", "central-inversion", _worst(inv), 1e-6),
        Check("fiber Plancherel", "fiber-plancherel", _worst(planch), 1e-8),
        Check("level projection commutes with fiber transform", "fiber-commutation", _worst(commute), 1e-6),
    ]


def _commutation_residual(g: PolyGauss, rho: float, k: int, xi: float, n: int = 64, nv: int = 64) -> float:
    L = tw.box_half_width(rho)
    tp = tw.TwistParams(rho, k)
    h = fourier_last(g, xi)
    a = tw.lambda_project(tw.GridFn2D.from_function(lambda s, t: h(np.stack([s, t], -1)), n, L), tp)
    vs, wv = gauss_legendre(nv, -10, 10)
    acc = np.zeros((n, n), dtype=complex)
    for v, w in zip(vs, wv):
        sl = tw.GridFn2D.from_function(lambda s, t: g(np.stack([s, t, np.full_like(s, v)], -1)), n, L)
        acc += w * np.exp(-1j * xi * v) * tw.lambda_project(sl, tp).samples
    return float(np.linalg.norm(acc - a.samples) / max(np.linalg.norm(a.samples), 1e-300))


# ------------------------------------------------------------------ spectral
def check_spectral(cfg: ValidateConfig, workers: int = 1) -> list[Check]:
    spec = QuadratureSpec()
    pts = pj.default_points(cfg.n_points, cfg.seed)
    out = []
    eig, skipped = [], []
    fns = gaussian_tensor_corpus() + centred_corpus(cfg.seed, 2)[1:]
    for f in fns:
        for mu in cfg.mus:
            r = pj.eigen_residual(f, mu, spec, pts, workers)
            if r.indeterminate:
                skipped.append(mu)
            else:
                eig.append(r.residual)
    out.append(Check("eigen-relation of the spectral density", "spectral-eigen", _worst(eig), 1e-3,
                     detail=f"{len(skipped)} indeterminate" if skipped else ""))
    dil = []
    f = gaussian_tensor_corpus()[1]
    for eps in (0.5, 2.0):
        for mu in (1.0, 4.0):
            dil.append(pj.dilation_covariance_residual(f, mu, eps, spec, pts, workers))
    out.append(Check("dilation covariance", "dilation-covariance", _worst(dil), 1e-6))
    g = centred_corpus(cfg.seed, 2)[1]
    a = pj.project_mu(g, 2.0, spec, pts, workers, check=False).values
    b = pj.project_mu(g, 2.0, QuadratureSpec(gauge=0.7), pts, workers, check=False).values
    out.append(Check("gauge invariance", "gauge-invariance", np.linalg.norm(a - b) / np.linalg.norm(a), 1e-8))
    h = gaussian_tensor_corpus()[0]
    c = pj.project_mu(h * 0.3 + g * (1 - 2j), 2.0, spec, pts, workers, check=False).values
    d = 0.3 * pj.project_mu(h, 2.0, spec, pts, workers, check=False).values + (1 - 2j) * a
    out.append(Check("linearity", "linearity", np.linalg.norm(c - d) / np.linalg.norm(d), 1e-12))
    if cfg.reconstruct:
        f = gaussian_tensor_corpus()[0]
        rp = pj.default_points(cfg.reconstruct_points, cfg.seed)
        exact = np.array([f.at(p) for p in rp])
        errs = []
        for n_mu in (24, 48):
            spec_mu = pj.default_spec(f, n_mu)
            rec = pj.reconstruct(f, spec_mu, rp, workers)
            errs.append(np.linalg.norm(rec - exact) / np.linalg.norm(exact))
        out.append(Check("reconstruction from spectral densities", "spectral-resolution", errs[1], 1e-2,
                         detail=f"coarse {errs[0]:.3e}"))
        out.append(Check("reconstruction improves under refinement", "spectral-resolution",
                         errs[1] / errs[0], 1.0))
    else:
        out.append(Check("reconstruction from spectral densities", "spectral-resolution", 0.0, 1e-2,
                         status="skipped", detail="disabled in config"))
    return out


# ------------------------------------------------------------------ exponents
def check_exponents(cfg: ValidateConfig) -> list[Check]:
    out = []
    spec = QuadratureSpec(n_theta=32)
    f = cft.AnalyticFn.gaussian()
    worst = 0.0
    notes = []
    for s, p in ((Fraction(6, 5), Fraction(2)), (Fraction(1), Fraction(1)), (Fraction(6, 5), Fraction(6, 5))):
        fit = nh.mu_exponent_fit(f, nh.MixedNormParams(s, p), [0.25, 1, 4, 16], spec)
        worst = max(worst, abs(fit.slope - fit.dilation_exponent))
        notes.append(f"s={s},p={p}: slope {fit.slope:.4f} dilation {fit.dilation_exponent:.4f} printed {fit.printed_exponent:.4f}")
    out.append(Check("restriction-ratio slope vs dilation exponent", "restriction-exponent", worst, 0.05,
                     detail="; ".join(notes)))
    fam = tw.kr_family(1.0)
    ks = list(range(9))
    ratios = tw.kr_sweep(1.0, [1.0, 1.2, 2.0], ks, fam)
    slope = max(tw.loglog_slope([2 * k + 1 for k in ks], r)[0] for r in ratios.values())
    out.append(Check("level-growth slope of normalized probe ratios", "koch-ricci-trend", max(slope, 0.0), 0.15,
                     detail=f"max slope {slope:.4f}"))
    gam = [tw.gamma_exponent(Fraction(1)), tw.gamma_exponent(Fraction(6, 5)), tw.gamma_exponent(Fraction(2))]
    out.append(Check("gamma at p = 1, 6/5, 2", "gamma-exponent",
                     float(abs(gam[0]) + abs(gam[1] + Fraction(1, 6)) + abs(gam[2])), 0.0))
    grid = [Fraction(1) + Fraction(i, 245) for i in range(50)]  # 50 points on [1, 6/5]
    const = max(abs(nh.series_exponent(Fraction(6, 5), p) + Fraction(5, 2)) for p in grid)
    out.append(Check("series exponent constant on [1, 6/5]", "series-exponent", float(const), 0.0))
    viol = 0.0
    for s in [Fraction(1) + Fraction(i, 50) for i in range(11)]:
        for p in [Fraction(6, 5) + Fraction(4 * i, 245) for i in range(50)]:
            viol = max(viol, float(nh.series_exponent(s, p) + Fraction(3, 2)))
    out.append(Check("series exponent <= -3/2 on the stated ranges", "series-exponent", max(viol, 0.0), 0.0))
    ts = 0.0
    for s in (1.0, 1.2, 4 / 3):
        C = nh.tomas_stein_family_max(1.0, s)
        for r in (0.5, 1, 2, 4, 8):
            ts = max(ts, nh.tomas_stein_family_max(r, s) / C - 1)
    out.append(Check("sphere restriction bound with constant fitted at r = 1", "tomas-stein", max(ts, 0.0), 1e-3,
                     detail=f"max excess {ts:.2e}"))
    return out


RUNNERS = {
    "structure": check_structure,
    "operators": check_operators,
    "twisted": check_twisted,
    "oracle": check_oracle,
    "central": check_central,
    "spectral": check_spectral,
    "exponents": check_exponents,
}


def run(cfg: ValidateConfig, workers: int = 1) -> list[Check]:
    out = []
    for name in SUITES:
        if name not in cfg.suites:
            continue
        fn = RUNNERS[name]
        out.extend(fn(cfg, workers) if name == "spectral" else fn(cfg))
    return out
