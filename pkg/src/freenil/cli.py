"""Command-line front end.

Every run reads one JSON config (``--config``), merges it over the built-in
defaults for the command, validates it, and writes ``<command>-<hash>.csv`` and
``<command>-<hash>.json`` into ``--out``.  The hash covers the command and the
resolved config, not the worker count, so reports are identical for any
``--workers``.  Exit codes: 0 success, 1 contract failure, 2 config error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import checks
from . import normharness as nh
from . import oracle as orc
from . import projector as pj
from . import twisted as tw
from .centralft import AnalyticFn
from .corpus import twisted_corpus
from .nilgeom import GroupPoint
from .quadrature import QuadratureSpec


class ConfigError(ValueError):
    pass


# ------------------------------------------------------------------ defaults
DEFAULTS: dict[str, dict] = {
    "validate": {f.name: (list(f.default) if isinstance(f.default, tuple) else f.default)
                 for f in dataclasses.fields(checks.ValidateConfig)},
    "project": {"mu": 1.0, "function": None, "points": None, "n_points": 16, "seed": 0, "quadrature": {}},
    "reconstruct": {"function": None, "points": None, "n_points": 16, "seed": 0, "n_mu": 48,
                    "quadrature": {}, "tolerance": 1e-2},
    "sweep-mu": {"s": "6/5", "p": "2", "mus": [0.25, 1.0, 4.0, 16.0], "function": None, "rescale": True,
                 "n_theta": 32, "tolerance": 0.05},
    "sweep-kr": {"lam": 1.0, "ps": ["1", "6/5", "2"], "ks": list(range(9)), "widths": [0.125, 0.25, 0.5, 1.0, 2.0],
                 "grid": 128, "slope_tol": 0.15},
    "sweep-ts": {"ss": ["1", "6/5", "4/3"], "rs": [0.5, 1.0, 2.0, 4.0, 8.0], "slack": 1e-3},
    "oracle": {"lams": [1.0, 2.0], "n": 64, "levels": 9, "corpus": 20, "seed": 0, "tolerance": 1e-4},
}

QUAD_FIELDS = {"n_theta", "n_phi", "xi_nodes", "k_max", "rho_nodes", "gauge"}


def _type_ok(value, default) -> bool:
    if default is None:
        return True
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(default, int):
        return isinstance(value, int) and not isinstance(value, bool)
    if isinstance(default, float):
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if isinstance(default, str):
        return isinstance(value, (str, int, float)) and not isinstance(value, bool)
    if isinstance(default, list):
        return isinstance(value, list)
    if isinstance(default, dict):
        return isinstance(value, dict)
    return True


def resolve_config(command: str, raw: dict) -> dict:
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")
    base = DEFAULTS[command]
    unknown = sorted(set(raw) - set(base) - {"workers"})
    if unknown:
        raise ConfigError(f"config field {unknown[0]!r}: unknown for command {command!r}")
    out = json.loads(json.dumps(base))
    for k, v in raw.items():
        if k == "workers":
            continue
        if not _type_ok(v, base[k]):
            raise ConfigError(f"config field {k!r}: expected {type(base[k]).__name__}, got {type(v).__name__}")
        out[k] = v
    if "quadrature" in out:
        bad = sorted(set(out["quadrature"]) - QUAD_FIELDS)
        if bad:
            raise ConfigError(f"config field 'quadrature.{bad[0]}': unknown")
    return out


def config_hash(command: str, cfg: dict) -> str:
    text = json.dumps({"command": command, "config": cfg}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"config file {path!r}: {e.strerror}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path!r}, line {e.lineno} column {e.colno}: {e.msg}")


def _frac(name: str, v) -> Fraction:
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"config field {name!r}: not a number: {v!r}")


def _function(cfg: dict) -> AnalyticFn:
    spec = cfg.get("function")
    if spec is None:
        return AnalyticFn.gaussian()
    try:
        if isinstance(spec, str):
            return AnalyticFn.from_json(Path(spec).read_text(encoding="utf-8"))
        return AnalyticFn.from_json(spec)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ConfigError(f"config field 'function': {e}")


def _points(cfg: dict) -> list[GroupPoint]:
    if cfg["points"] is None:
        return pj.default_points(cfg["n_points"], cfg["seed"])
    try:
        return [GroupPoint(np.asarray(p[:3], float), np.asarray(p[3:], float)) for p in cfg["points"]
                if len(p) == 6 or (_ for _ in ()).throw(ValueError("points need six coordinates"))]
    except (ValueError, TypeError) as e:
        raise ConfigError(f"config field 'points': {e}")


def _quad(cfg: dict, **extra) -> QuadratureSpec:
    try:
        return QuadratureSpec(**{**cfg.get("quadrature", {}), **extra})
    except (ValueError, TypeError) as e:
        raise ConfigError(f"config field 'quadrature': {e}")


# ------------------------------------------------------------------ output
def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def _strict(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _strict(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_strict(v) for v in obj]
    return obj


def _write(out: Path, command: str, h: str, csv_text: str, summary: dict) -> tuple[Path, Path]:
    out.mkdir(parents=True, exist_ok=True)
    c = out / f"{command}-{h}.csv"
    j = out / f"{command}-{h}.json"
    c.write_bytes(csv_text.encode("utf-8"))
    j.write_bytes((json.dumps(_strict(summary), indent=2, sort_keys=True, default=_num, allow_nan=False) + "\n").encode("utf-8"))
    return c, j


# ------------------------------------------------------------------ commands
def cmd_validate(cfg: dict, workers: int):
    try:
        vc = checks.ValidateConfig(**{k: (tuple(v) if isinstance(v, list) else v) for k, v in cfg.items()})
    except (ValueError, TypeError) as e:
        raise ConfigError(f"config field {e}")
    results = checks.run(vc, workers)
    rows = [[c.tag, c.name, _num(c.measured), _num(c.tolerance), c.status, c.detail] for c in results]
    ok = all(c.passed for c in results)
    summary = {"passed": ok, "checks": [c.as_dict() for c in results]}
    return ok, _csv(["tag", "check", "measured", "tolerance", "status", "detail"], rows), summary


def cmd_project(cfg: dict, workers: int):
    f = _function(cfg)
    pts = _points(cfg)
    mu = float(cfg["mu"])
    if not mu > 0:
        raise ConfigError("config field 'mu': must be positive")
    spec = _quad(cfg)
    try:
        sl = pj.project_mu(f, mu, spec, pts, workers)
    except pj.SpecInsufficient as e:
        return False, _csv(["mu", "point", "x1", "x2", "x3", "z1", "z2", "z3", "re", "im"], []), {
            "error": str(e), "component": e.component, "quadrature": spec.to_dict()}
    return True, sl.to_csv(), json.loads(sl.sidecar())


def cmd_reconstruct(cfg: dict, workers: int):
    f = _function(cfg)
    pts = _points(cfg)
    lo, hi = pj.mu_range(f)
    spec = _quad(cfg, **dict(zip(("mu_nodes", "mu_weights"), _mu_rule(lo, hi, cfg["n_mu"]))))
    rec = pj.reconstruct(f, spec, pts, workers)
    exact = np.array([f.at(p) for p in pts])
    den = np.linalg.norm(exact)
    err = float(np.linalg.norm(rec - exact) / den) if den else float(np.linalg.norm(rec))
    rows = [[i, *map(_num, p.x), *map(_num, p.z), _num(v.real), _num(v.imag), _num(e.real), _num(e.imag)]
            for i, (p, v, e) in enumerate(zip(pts, rec, exact))]
    ok = err <= cfg["tolerance"]
    summary = {"relative_error": err, "tolerance": cfg["tolerance"], "tag": "spectral-resolution",
               "passed": ok, "quadrature": spec.to_dict()}
    return ok, _csv(["point", "x1", "x2", "x3", "z1", "z2", "z3", "re", "im", "exact_re", "exact_im"], rows), summary


def _mu_rule(lo, hi, n):
    from .quadrature import gauss_legendre

    m, w = gauss_legendre(n, lo, hi)
    return tuple(m), tuple(w)


def cmd_sweep_mu(cfg: dict, workers: int):
    f = _function(cfg)
    s, p = _frac("s", cfg["s"]), _frac("p", cfg["p"])
    try:
        mp = nh.MixedNormParams(s, p, strict=False)
    except ValueError as e:
        raise ConfigError(f"config field 's'/'p': {e}")
    try:
        fit = nh.mu_exponent_fit(f, mp, cfg["mus"], QuadratureSpec(n_theta=cfg["n_theta"]), rescale=cfg["rescale"])
    except (ValueError, TypeError) as e:
        raise ConfigError(f"config field 'mus': {e}")
    slope, dil = fit.slope, fit.dilation_exponent
    ok = abs(slope - dil) <= cfg["tolerance"]
    rows = [["restriction-exponent", _num(mu), _num(r)] for mu, r in zip(fit.mus, fit.ratios)]
    summary = {"tag": "restriction-exponent", "slope": slope, "fit_residual": fit.residual, "dilation_exponent": dil,
               "printed_exponent": fit.printed_exponent, "band": fit.band, "power_law": fit.power_law,
               "tolerance": cfg["tolerance"], "passed": ok}
    return ok, _csv(["tag", "mu", "ratio"], rows), summary


def cmd_sweep_kr(cfg: dict, workers: int):
    ps = [_frac("ps", p) for p in cfg["ps"]]
    ks = [int(k) for k in cfg["ks"]]
    if len(ks) < 4:
        raise ConfigError("config field 'ks': need at least four values")
    if any(not 1 <= p <= 2 for p in ps):
        raise ConfigError("config field 'ps': values must lie in [1, 2]")
    lam = float(cfg["lam"])
    fam = tw.kr_family(lam, cfg["grid"], tuple(cfg["widths"]))
    ratios = tw.kr_sweep(lam, [float(p) for p in ps], ks, fam)
    rows, fits = [], {}
    for p in ps:
        r = ratios[float(p)]
        slope, resid = tw.loglog_slope([2 * k + 1 for k in ks], r)
        fits[str(p)] = {"slope": slope, "fit_residual": resid, "gamma": tw.gamma_exponent(p)}
        rows += [["koch-ricci-trend", str(p), k, _num(v)] for k, v in zip(ks, r)]
    ok = all(v["slope"] <= cfg["slope_tol"] for v in fits.values())
    summary = {"tag": "koch-ricci-trend", "fits": fits, "tolerance": cfg["slope_tol"], "passed": ok}
    return ok, _csv(["tag", "p", "k", "ratio"], rows), summary


def cmd_sweep_ts(cfg: dict, workers: int):
    ss = [_frac("ss", s) for s in cfg["ss"]]
    if any(not 1 <= s <= nh.S_PROBE for s in ss):
        raise ConfigError("config field 'ss': values must lie in [1, 4/3]")
    rs = [float(r) for r in cfg["rs"]]
    if len(rs) < 4 or 1.0 not in rs:
        raise ConfigError("config field 'rs': need at least four values including 1")
    rows, fits, ok = [], {}, True
    for s in ss:
        vals = [nh.tomas_stein_family_max(r, float(s)) for r in rs]
        C = vals[rs.index(1.0)]
        excess = max(v / C - 1 for v in vals)
        fits[str(s)] = {"constant": C, "max_excess": excess, "holds": excess <= cfg["slack"]}
        ok &= excess <= cfg["slack"]
        rows += [["tomas-stein", str(s), _num(r), _num(v)] for r, v in zip(rs, vals)]
    return ok, _csv(["tag", "s", "r", "ratio"], rows), {"tag": "tomas-stein", "fits": fits, "slack": cfg["slack"], "passed": ok}


def cmd_oracle(cfg: dict, workers: int):
    n = int(cfg["n"])
    if n * n > orc.DENSE_BUDGET or n % 2:
        raise ConfigError("config field 'n': must be even with n^2 <= 4096")
    rows, worst_c, worst_p = [], 0.0, 0.0
    for lam in cfg["lams"]:
        M = orc.discretize_twisted(float(lam), n, orc.oracle_box(float(lam), n))
        for k, (val, deg, win) in enumerate(orc.clusters(M, cfg["levels"])):
            rel = abs(val / (lam * (2 * k + 1)) - 1) if deg else float("inf")
            worst_c = max(worst_c, rel)
            rows.append(["oracle-clusters", _num(lam), k, _num(val), deg, _num(rel)])
        for i, g in enumerate(twisted_corpus(float(lam), n, M.half_width, cfg["seed"], cfg["corpus"], offset=0.5)):
            k = i % 4
            d = orc.compare_lambda_projection(float(lam), k, g, M)
            worst_p = max(worst_p, d)
            rows.append(["oracle-projection", _num(lam), k, "", "", _num(d)])
    ok = worst_c <= 1e-3 and worst_p <= cfg["tolerance"]
    summary = {"cluster_rel_error": worst_c, "projection_discrepancy": worst_p, "cluster_tolerance": 1e-3,
               "projection_tolerance": cfg["tolerance"], "passed": ok}
    return ok, _csv(["tag", "lam", "k", "value", "degeneracy", "residual"], rows), summary


COMMANDS = {
    "validate": cmd_validate,
    "project": cmd_project,
    "reconstruct": cmd_reconstruct,
    "sweep-mu": cmd_sweep_mu,
    "sweep-kr": cmd_sweep_kr,
    "sweep-ts": cmd_sweep_ts,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="freenil", description="Spectral analysis of the sub-Laplacian on the free two-step nilpotent group with three generators.")
    ap.add_argument("command", choices=[*COMMANDS, "defaults"])
    ap.add_argument("--config", default=None, help="JSON config file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--workers", type=int, default=None, help="worker processes (results do not depend on it)")
    args = ap.parse_args(argv)
    if args.command == "defaults":
        sys.stdout.write(json.dumps(DEFAULTS, indent=2, sort_keys=True) + "\n")
        return 0
    try:
        raw = load_config(args.config)
        cfg = resolve_config(args.command, raw)
        workers = args.workers if args.workers is not None else raw.get("workers", 1)
        if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
            raise ConfigError("config field 'workers': must be an integer >= 1")
        h = config_hash(args.command, cfg)
        ok, csv_text, summary = COMMANDS[args.command](cfg, workers)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except pj.Unsupported as e:
        print(f"config error: unsupported input function: {e}", file=sys.stderr)
        return 2
    summary = {"command": args.command, "config": cfg, "config_hash": h, **summary}
    c, j = _write(Path(args.out), args.command, h, csv_text, summary)
    print(f"{'ok' if ok else 'FAILED'}: {c} {j}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
