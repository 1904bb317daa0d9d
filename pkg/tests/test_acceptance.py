"""Acceptance criteria 1-13, one pass/fail line each.

Criteria 1-12 share a single run of the full validation suite; criterion 13
runs the ``validate`` command twice on a light config with different worker
counts and compares the report bytes.  Run standalone with
``python tests/test_acceptance.py`` or through pytest (the lines are echoed in
the terminal summary).
"""

from __future__ import annotations

import functools
import json
import sys
import tempfile
from pathlib import Path

import pytest

from freenil import checks, cli

CRITERIA = {
    1: ("structure constants", {"structure-constants"}),
    2: ("adapted frames", {"adapted-frame"}),
    3: ("operator identities and homogeneity", {"sublaplacian-expansion", "fiber-expansion", "homogeneity"}),
    4: ("intertwining and conjugation", {"intertwining", "conjugation"}),
    5: ("twisted spectral theory",
        {"twisted-eigen", "projection-idempotence", "projection-orthogonality", "completeness", "ground-state"}),
    6: ("oracle agreement", {"oracle-hermitian", "oracle-clusters", "oracle-projection"}),
    7: ("central transform, inversion, Plancherel",
        {"central-transform", "central-inversion", "fiber-plancherel", "fiber-commutation"}),
    8: ("spectral resolution", {"spectral-eigen", "spectral-resolution", "gauge-invariance", "linearity"}),
    9: ("dilation covariance", {"dilation-covariance"}),
    10: ("restriction exponent vs dilation", {"restriction-exponent"}),
    11: ("level-growth trend and gamma", {"koch-ricci-trend", "gamma-exponent"}),
    12: ("series exponent and sphere restriction", {"series-exponent", "tomas-stein"}),
}
DETERMINISM = (13, "determinism across worker counts")
LIGHT = {"suites": ["structure", "central", "spectral"], "mus": [1.0], "n_points": 4, "reconstruct": False}

LINES: dict[int, str] = {}


@functools.lru_cache(maxsize=None)
def full_run() -> tuple:
    return tuple(checks.run(checks.ValidateConfig()))


def _line(n: int, title: str, ok: bool, detail: str) -> str:
    return f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


def evaluate(n: int) -> tuple[bool, str]:
    title, tags = CRITERIA[n]
    rows = [c for c in full_run() if c.tag in tags]
    if not rows:
        return False, _line(n, title, False, "no checks ran")
    ok = all(c.passed for c in rows)
    worst = max(rows, key=lambda c: (not c.passed, c.measured / c.tolerance if c.tolerance else c.measured))
    detail = f"{len(rows)} checks, worst '{worst.name}' {worst.measured:.3e} (tol {worst.tolerance:.1e})"
    if not ok:
        detail += "; failing: " + ", ".join(c.name for c in rows if not c.passed)
    return ok, _line(n, title, ok, detail)


def determinism() -> tuple[bool, str]:
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        (d / "cfg.json").write_text(json.dumps(LIGHT))
        codes, blobs = [], []
        for w in (1, 2):
            out = d / f"w{w}"
            codes.append(cli.main(["validate", "--config", str(d / "cfg.json"), "--out", str(out), "--workers", str(w)]))
            blobs.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
    ok = codes == [0, 0] and blobs[0] == blobs[1] and len(blobs[0]) == 2
    return ok, _line(*DETERMINISM, ok, f"exit codes {codes}, {len(blobs[0])} files, identical={blobs[0] == blobs[1]}")


def test_every_check_is_mapped():
    mapped = set().union(*(tags for _, tags in CRITERIA.values()))
    assert {c.tag for c in full_run()} <= mapped


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    ok, line = evaluate(n)
    LINES[n] = line
    print(line)
    assert ok, line


def test_criterion_13_determinism():
    ok, line = determinism()
    LINES[13] = line
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(n) for n in sorted(CRITERIA)] + [determinism()]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
