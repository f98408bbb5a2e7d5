"""Acceptance criteria, each at its stated tolerance and runtime budget.

Every test records one ``PASS``/``FAIL`` line, printed in the terminal summary.
"""

import filecmp
import subprocess
import sys
import time
from pathlib import Path

import pytest

from weyl_lab.numerics import load_config
from weyl_lab.reports import run_suite

from conftest import ACCEPTANCE_LINES

ROOT = Path(__file__).resolve().parent.parent
CONFIG = ROOT / "configs" / "default.cfg"


def timed(*suites):
    cfg, extras = load_config(CONFIG)
    t0 = time.perf_counter()
    reports = [run_suite(s, cfg, extras, CONFIG.parent) for s in suites]
    return reports, time.perf_counter() - t0


def cases(report, prefix):
    out = [c for c in report.cases if c.name.startswith(prefix)]
    assert out, f"no cases named {prefix!r}"
    return out


def record(number, title, ok, detail, elapsed, budget):
    ok = ok and elapsed <= budget
    limit = "no budget" if budget == float("inf") else f"budget {budget}s"
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}: {detail}; {elapsed:.1f}s ({limit})")
    print(ACCEPTANCE_LINES[-1])
    assert ok, ACCEPTANCE_LINES[-1]


def worst(cs):
    return max(c.rel_err for c in cs)


def test_01_fourier_wigner_orthogonality():
    (r,), dt = timed("hmg-wigner")
    cs = cases(r, "orthogonality")
    ok = len(cs) == 20 and all(c.rel_err <= 1e-5 for c in cs)
    record(1, "Fourier-Wigner orthogonality", ok, f"{len(cs)} quadruples, worst rel_err {worst(cs):.2e} <= 1e-5", dt, 60)


def test_02_plancherel():
    (r,), dt = timed("hmg-plancherel")
    cs = cases(r, "plancherel")
    wit = cases(r, "witness")
    ok = len(cs) == 20 and all(c.rel_err <= 1e-4 for c in cs + wit)
    record(2, "Plancherel", ok, f"{len(cs)} functions worst {worst(cs):.2e}, witness worst {worst(wit):.2e} <= 1e-4", dt, 120)


def test_03_inversion():
    (r,), dt = timed("hmg-inversion")
    cs = cases(r, "roundtrip_l2")
    ok = len(cs) == 20 and all(c.measured <= 1e-4 for c in cs)
    record(3, "inversion round trip", ok, f"{len(cs)} functions, worst L2 error {worst(cs):.2e} <= 1e-4", dt, 120)


def test_04_hs_identity():
    (r,), dt = timed("proj-hs-scaling")
    fro, ker, agree = cases(r, "hs_frobenius"), cases(r, "hs_kernel"), cases(r, "paths_agree")
    ok = len(fro) == len(ker) == 24 and all(c.rel_err <= 1e-2 for c in fro + ker + agree)
    record(4, "Hilbert-Schmidt identity", ok, f"3 sets x N=1..8, worst {worst(fro + ker):.2e}, paths {worst(agree):.2e} <= 1e-2", dt, 180)


def test_05_growth_translate():
    (r,), dt = timed("sets-growth")
    cs = cases(r, "growth")
    ok = len(cs) == 10 and all(c.passed for c in cs)
    record(5, "growth translate", ok, f"{sum(c.passed for c in cs)}/{len(cs)} strict inequalities hold exactly", dt, 5)


def test_06_intersection():
    (r,), dt = timed("proj-intersection")
    sig, rank, dec = cases(r, "sigma_max<1"), cases(r, "limit_rank"), cases(r, "decay_ratio")
    ok = all(c.passed for c in sig + rank) and all(c.rel_err <= 0.05 for c in dec)
    top = max(c.measured for c in sig)
    record(6, "intersection", ok, f"max sigma {top:.4f} < 1, limit ranks {[c.measured for c in rank]}, decay worst {worst(dec):.2e} <= 5%", dt, 120)


def test_07_independence():
    (r,), dt = timed("proj-independence")
    cs = cases(r, "gram_rank")
    ok = len(cs) == 2 and all(c.measured == 4 for c in cs)
    record(7, "independence", ok, f"Gram ranks {[c.measured for c in cs]} == 4", dt, 60)


def test_08_quat_plancherel_inversion():
    (rp, ri), dt = timed("quat-plancherel", "quat-inversion")
    ratios = cases(rp, "ratio[")
    inv = cases(ri, "roundtrip_l2")
    ok = len(ratios) == 40 and all(c.rel_err <= 1e-2 for c in ratios) and all(c.measured <= 1e-2 for c in inv)
    record(8, "quaternion Plancherel and inversion", ok, f"ratio worst {worst(ratios):.2e}, inversion worst {worst(inv):.2e} <= 1e-2", dt, 300)


def test_09_schur():
    (r,), dt = timed("quat-schur")
    spread, wit = cases(r, "spread"), cases(r, "witness_norm")
    ok = all(c.measured <= 1e-2 for c in spread) and all(c.rel_err <= 1e-6 for c in wit)
    record(9, "Schur constant", ok, f"spread worst {worst(spread):.2e} <= 1e-2, witness norm error {worst(wit):.2e} <= 1e-6", dt, 120)


def test_10_twisted_convolution():
    (r,), dt = timed("quat-twisted")
    cs = cases(r, "convolution_identity")
    ok = all(c.measured <= 1e-2 for c in cs)
    record(10, "twisted convolution", ok, f"{len(cs)} pairs, worst relative defect {worst(cs):.2e} <= 1e-2", dt, 120)


def test_11_strong_annihilating_pair():
    (r,), dt = timed("proj-annihilate")
    viol, supp = cases(r, "violations"), cases(r, "support_form_violations")
    ok = all(c.measured == 0 for c in viol + supp) and all(c.passed for c in cases(r, "C>=1"))
    record(11, "strong annihilating pair", ok, f"violations {[c.measured for c in viol]}, support form {[c.measured for c in supp]}", dt, 60)


@pytest.mark.slow
def test_12_determinism(tmp_path):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    t0 = time.perf_counter()
    codes = [
        subprocess.run([sys.executable, "-m", "weyl_lab.cli", "all", "--config", str(CONFIG), "--out", str(o)]).returncode
        for o in outs
    ]
    dt = time.perf_counter() - t0
    same = filecmp.cmp(outs[0], outs[1], shallow=False)
    record(12, "determinism", same and codes == [0, 0], f"exit codes {codes}, byte-identical JSON: {same}", dt, float("inf"))
