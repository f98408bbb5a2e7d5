"""Verification suites and their machine-readable reports.

Every suite is a pure function of ``(TruncationConfig, extras, base_dir)``
returning a :class:`VerificationReport`.  Random draws come from a generator
seeded by the config seed and the suite name, so reports are reproducible
byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import time
import zlib
from dataclasses import dataclass, field
from math import floor, isfinite, pi
from pathlib import Path
from typing import Callable

import numpy as np

from . import hmg as H
from . import projection as P
from . import quat as Q
from .gridsets import GridSet, exact_measure, exact_union_measure, find_growth_translate
from .numerics import TruncationConfig, eps_rank, gauss_grid_4d

TWO_PI = 2.0 * pi

__all__ = ["Case", "VerificationReport", "SUITES", "run_suite", "emit", "default_sets"]


def _fmt(x):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if not isfinite(x):
        return repr(x)
    return float(f"{x:.12g}")


@dataclass
class Case:
    name: str
    expected: float | None
    measured: float
    rel_err: float | None
    passed: bool
    tolerance: float | None = None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "expected": _fmt(self.expected),
            "measured": _fmt(self.measured),
            "rel_err": _fmt(self.rel_err),
            "pass": bool(self.passed),
            "tolerance": _fmt(self.tolerance),
        }


def rel_case(name: str, expected: float, measured: float, tol: float) -> Case:
    """Pass iff ``|measured - expected| / |expected| <= tol``."""
    err = abs(measured - expected) / max(abs(expected), 1e-300)
    return Case(name, expected, measured, err, err <= tol, tol)


def abs_case(name: str, expected: float, measured: float, tol: float) -> Case:
    """Absolute-error case; ``rel_err`` carries the absolute error."""
    err = abs(measured - expected)
    return Case(name, expected, measured, err, err <= tol, tol)


def bool_case(name: str, measured: float, ok: bool, expected: float | None = None) -> Case:
    return Case(name, expected, measured, None, bool(ok), None)


@dataclass
class VerificationReport:
    suite: str
    config: dict
    cases: list = field(default_factory=list)
    wall_time: float | None = None
    suites: list | None = None

    @property
    def passed(self) -> bool:
        own = all(c.passed for c in self.cases)
        return own and all(s.passed for s in (self.suites or []))

    def as_dict(self) -> dict:
        d = {
            "suite": self.suite,
            "config": self.config,
            "cases": [c.as_dict() for c in self.cases],
            "wall_time": _fmt(self.wall_time),
        }
        if self.suites is not None:
            d["suites"] = [s.as_dict() for s in self.suites]
        return d

    def flat_rows(self) -> list[tuple]:
        rows = [(self.suite, c.as_dict()) for c in self.cases]
        for s in self.suites or []:
            rows += s.flat_rows()
        return rows

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        cases = [
            Case(c["name"], c["expected"], c["measured"], c["rel_err"], c["pass"], c.get("tolerance"))
            for c in d.get("cases", [])
        ]
        subs = [cls.from_dict(s) for s in d["suites"]] if "suites" in d else None
        return cls(d["suite"], d["config"], cases, d.get("wall_time"), subs)


def to_json(report: VerificationReport) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=False) + "\n"


def to_csv(report: VerificationReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "case", "expected", "measured", "rel_err", "pass"])
    for suite, c in report.flat_rows():
        w.writerow([suite, c["name"], _csv(c["expected"]), _csv(c["measured"]), _csv(c["rel_err"]), str(c["pass"]).lower()])
    return buf.getvalue()


def _csv(v) -> str:
    return "" if v is None else repr(v) if isinstance(v, float) else str(v)


def emit(report: VerificationReport, fmt: str = "json", path: str | Path | None = None) -> str:
    """Serialise a report; writes to ``path`` when given and returns the text."""
    if fmt == "json":
        text = to_json(report)
    elif fmt == "csv":
        text = to_csv(report)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


# ----------------------------------------------------------------- context


@dataclass
class SuiteContext:
    cfg: TruncationConfig
    extras: dict
    base: Path

    def rng(self, name: str) -> np.random.Generator:
        return np.random.default_rng([self.cfg.seed, zlib.crc32(name.encode())])

    def sets(self, key: str, default: list[GridSet]) -> list[GridSet]:
        raw = self.extras.get(key)
        return load_sets(raw, self.base) if raw else default


SET_KEYS = {"hmg_sets", "quat_sets"}


def load_sets(raw: str, base: str | Path) -> list[GridSet]:
    """Comma-separated list of set files, relative to ``base``."""
    return [GridSet.load(Path(base) / p.strip()) for p in raw.split(",") if p.strip()]


def default_sets() -> dict[str, list[GridSet]]:
    """Cell sets used when the config names none; identical to ``configs/sets``."""
    h = 0.4
    a1 = GridSet.box(2, h, (-2, -2), (2, 2))
    a2 = GridSet(2, h, [(i, j) for i in range(-2, 2) for j in range(-2, 0)] + [(i, j) for i in range(-2, 0) for j in range(0, 2)])
    a3 = GridSet.box(2, h, (0, -1), (2, 1))
    q = GridSet.box(4, 0.25, (-1,) * 4, (1,) * 4)
    return {"hmg_sets": [a1, a2, a3], "quat_sets": [q]}


def _unit(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def _near(rng: np.random.Generator, v: np.ndarray, spread: float = 0.5) -> np.ndarray:
    w = v + spread * _unit(rng, v.size)
    return w / np.linalg.norm(w)


# -------------------------------------------------------------- hmg suites


def _hmg_ctx(sc: SuiteContext) -> H.HMGContext:
    return H.HMGContext.from_config(sc.cfg)


def _hmg_corpus(sc: SuiteContext, name: str, count: int = 20) -> list[dict[int, np.ndarray]]:
    """Band-limited coefficient families: Hermite modes below the trusted bound, a few sectors with |m| <= T/4."""
    rng = sc.rng(name)
    n = sc.cfg.trusted
    q = sc.cfg.theta_samples // 4
    out = []
    for _ in range(count):
        k = int(rng.integers(1, 4))
        ms = sorted(int(m) for m in rng.choice(np.arange(-q, q + 1), size=k, replace=False))
        out.append({m: rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for m in ms})
    return out


def _hmg_transform_corpus(ctx, corpus, batch: int = 5):
    gs, ws = [], []
    sectors = sorted({m for c in corpus for m in c})
    for s in range(0, len(corpus), batch):
        part = H.synthesize_batch(ctx, [{m: c for m, c in fam.items()} for fam in corpus[s : s + batch]])
        ws += H.weyl_transforms(ctx, part, sectors)
        gs += part
    return gs, ws, sectors


def suite_hmg_plancherel(sc: SuiteContext) -> list[Case]:
    ctx = _hmg_ctx(sc)
    corpus = _hmg_corpus(sc, "hmg-corpus")
    gs, ws, sectors = _hmg_transform_corpus(ctx, corpus)
    cases = []
    for i, (g, w) in enumerate(zip(gs, ws)):
        lhs = g.norm_sq()
        rhs = sum(float(np.sum(np.abs(w[m].entries) ** 2)) for m in sectors) / TWO_PI
        cases.append(rel_case(f"plancherel[{i}]", rhs, lhs, 1e-4))
    # conj-V witness: both sides equal 2 pi
    rng = sc.rng("hmg-plancherel-witness")
    n = sc.cfg.trusted
    zeta, eta = _unit(rng, n), _unit(rng, n)
    g = H.sector_function(ctx, {0: np.outer(eta, zeta.conj())})
    w = H.weyl_transform(ctx, g, 0)
    cases.append(rel_case("witness_l2", TWO_PI, g.norm_sq(), 1e-4))
    cases.append(rel_case("witness_hs_over_2pi", TWO_PI, float(np.sum(np.abs(w.entries) ** 2)) / TWO_PI, 1e-4))
    cases.append(rel_case("witness_hs_norm", TWO_PI, float(np.linalg.norm(w.entries)), 1e-4))
    return cases


def suite_hmg_inversion(sc: SuiteContext) -> list[Case]:
    ctx = _hmg_ctx(sc)
    corpus = _hmg_corpus(sc, "hmg-corpus")
    gs, ws, sectors = _hmg_transform_corpus(ctx, corpus)
    cases = []
    n = sc.cfg.trusted
    # band-limited inversion: entries outside the trusted block are quadrature leakage
    for s in range(0, len(gs), 5):
        recs = H.synthesize_batch(ctx, [{m: w[m].entries[:n, :n] for m in sectors} for w in ws[s : s + 5]])
        for i, (g, rec) in enumerate(zip(gs[s : s + 5], recs)):
            err = np.sqrt((rec.scaled(1.0 / TWO_PI) - g).norm_sq() / g.norm_sq())
            cases.append(abs_case(f"roundtrip_l2[{s + i}]", 0.0, err, 1e-4))
    # pointwise inversion at seeded grid points for the first function
    rng = sc.rng("hmg-inversion-points")
    idx = rng.integers(0, ctx.grid.size, size=5)
    tix = rng.integers(0, ctx.T, size=5)
    for j, (a, b) in enumerate(zip(idx, tix)):
        p = H.HMGPoint(ctx.z[a], ctx.thetas[b])
        val = H.inversion_reconstruct(ws[0], p, n)
        ref = gs[0].values[a, b]
        scale = np.sqrt(gs[0].norm_sq())
        cases.append(abs_case(f"pointwise[{j}]", 0.0, abs(val - ref) / scale, 1e-4))
    # rank-one conj-V example
    rng = sc.rng("hmg-inversion-witness")
    n = sc.cfg.trusted
    zeta, eta = _unit(rng, n), _unit(rng, n)
    g = H.sector_function(ctx, {1: np.outer(eta, zeta.conj())})
    w = H.weyl_transforms(ctx, [g], [1])[0]
    rec = H.inversion_on_grid(ctx, {1: H.OperatorMatrix(w[1].entries[:n, :n], w[1].basis_tag)})
    err = np.sqrt((rec - g).norm_sq() / g.norm_sq())
    cases.append(abs_case("witness_roundtrip_l2", 0.0, err, 1e-4))
    return cases


def suite_hmg_wigner(sc: SuiteContext) -> list[Case]:
    ctx = _hmg_ctx(sc)
    rng = sc.rng("hmg-wigner")
    n = sc.cfg.trusted
    cases = []
    pairs = []
    for _ in range(20):
        z1, e1 = _unit(rng, n), _unit(rng, n)
        pairs += [(z1, e1), (_near(rng, z1), _near(rng, e1))]
    m = 0
    gram = H.fourier_wigner_gram(ctx, pairs, m)
    for q in range(20):
        (z1, e1), (z2, e2) = pairs[2 * q], pairs[2 * q + 1]
        expected = TWO_PI * np.vdot(z2, z1) * np.conj(np.vdot(e2, e1))
        measured = gram[2 * q, 2 * q + 1]
        err = abs(measured - expected) / abs(expected)
        cases.append(Case(f"orthogonality[{q}]", abs(expected), abs(measured), err, err <= 1e-5, 1e-5))
    # orthonormal basis {(2 pi)^{-1/2} V_{phi_j}^{phi_k}} in one sector
    eye = np.eye(n)
    basis_pairs = [(eye[j], eye[k]) for j in range(n) for k in range(n)]
    g2 = H.fourier_wigner_gram(ctx, basis_pairs, 2) / TWO_PI
    cases.append(abs_case("sector_basis_gram", 0.0, float(np.max(np.abs(g2 - np.eye(len(basis_pairs))))), 1e-5))
    # representation property and intertwining on the trusted block
    M = sc.cfg.hermite_cutoff
    worst = 0.0
    for _ in range(100):
        z, w = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        t1, t2 = rng.uniform(0, TWO_PI, size=2)
        a = H.rho_matrix(m, H.HMGPoint(z, t1), M).entries
        b = H.rho_matrix(m, H.HMGPoint(w, t2), M).entries
        c = H.rho_matrix(m, H.HMGPoint(z + np.exp(1j * t1) * w, t1 + t2), M).entries
        ph = np.exp(-0.5j * (np.exp(1j * t1) * w * np.conj(z)).imag)
        worst = max(worst, float(np.max(np.abs((a @ b)[:n, :n] - ph * c[:n, :n]))))
    cases.append(abs_case("representation_property", 0.0, worst, 1e-5))
    z, th = complex(*rng.normal(size=2)), float(rng.uniform(0, TWO_PI))
    lhs = H.schrodinger_matrix(np.exp(1j * th) * z, M).entries
    mu = H.metaplectic_diag(th, M).entries
    rhs = mu @ H.schrodinger_matrix(z, M).entries @ mu.conj().T
    cases.append(abs_case("intertwining", 0.0, float(np.max(np.abs(lhs - rhs)[:n, :n])), 1e-6))
    return cases


def suite_hmg_peterweyl(sc: SuiteContext) -> list[Case]:
    ctx = _hmg_ctx(sc)
    rng = sc.rng("hmg-peterweyl")
    n = sc.cfg.trusted
    cases = []
    coeffs = {m: rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for m in (-1, 0, 2)}
    parts = H.synthesize_batch(ctx, [{m: c} for m, c in coeffs.items()])
    g = parts[0] + parts[1] + parts[2]
    scale = np.sqrt(g.norm_sq())
    p0 = H.peter_weyl_project(ctx, g, 0)
    cases.append(abs_case("project_recovers_component", 0.0, np.sqrt((p0 - parts[1]).norm_sq()) / scale, 1e-5))
    p00 = H.peter_weyl_project(ctx, p0, 0)
    cases.append(abs_case("idempotent", 0.0, np.sqrt((p00 - p0).norm_sq()) / scale, 1e-6))
    other = parts[2]
    cases.append(abs_case("other_sector_to_zero", 0.0, np.sqrt(H.peter_weyl_project(ctx, other, 0).norm_sq()) / scale, 1e-5))
    h = H.synthesize_batch(ctx, [{m: rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)) for m in (0, 2)}])[0]
    ph = H.peter_weyl_project(ctx, h, 0)
    sa = abs(ph.inner(g) - h.inner(p0)) / (scale * np.sqrt(h.norm_sq()))
    cases.append(abs_case("self_adjoint", 0.0, sa, 1e-6))
    w_full = H.weyl_transform(ctx, g, 0).entries[:n, :n]
    w_comp = H.weyl_transform(ctx, parts[1], 0).entries[:n, :n]
    cases.append(abs_case("sector_consistency", 0.0, np.linalg.norm(w_full - w_comp) / np.linalg.norm(w_comp), 1e-5))
    # distinct-sector basis elements are orthogonal
    basis = H.synthesize_batch(ctx, [{0: np.eye(n)[:, :1] @ np.eye(n)[:1]}, {1: np.eye(n)[:, :1] @ np.eye(n)[:1]}])
    cases.append(abs_case("sector_orthogonality", 0.0, abs(basis[0].inner(basis[1])) / TWO_PI, 1e-6))
    # twisted translate: rank and range kept (grid-aligned shift, low modes)
    k = 3
    zeta, eta = np.zeros(n, complex), np.zeros(n, complex)
    zeta[:k], eta[:k] = _unit(rng, k), _unit(rng, k)
    g0 = H.sector_function(ctx, {0: np.outer(eta, zeta.conj())})
    w_shift = complex(5, -3) * ctx.spacing
    g1 = H.twisted_translate(ctx, g0, w_shift)
    W0, W1 = (x[0].entries[:n, :n] for x in H.weyl_transforms(ctx, [g0, g1], [0]))
    cases.append(Case("translate_rank", eps_rank(W0, 1e-6), eps_rank(W1, 1e-6), None, eps_rank(W0, 1e-6) == eps_rank(W1, 1e-6)))
    resid = np.linalg.norm(W1[k:, :]) / np.linalg.norm(W1)
    cases.append(abs_case("translate_range_residual", 0.0, resid, 1e-5))
    return cases


# -------------------------------------------------------------- grid sets


def suite_sets_growth(sc: SuiteContext) -> list[Case]:
    rng = sc.rng("sets-growth")
    cases = []
    for i in range(10):
        dim = 2 if i % 2 == 0 else 4
        side = 3 if dim == 2 else 2
        cells = {tuple(int(v) for v in rng.integers(0, side + 1, size=dim)) for _ in range(6 if dim == 2 else 8)}
        b = GridSet(dim, 0.5, cells)
        sub = sorted(b.cells)[: max(1, len(b.cells) // 2)]
        b0 = GridSet(dim, 0.5, sub)
        eps = float(rng.uniform(0.01, 1.0))
        w = find_growth_translate(b, b0, eps)
        mb = exact_measure(b)
        mu = exact_union_measure(b, b0, w)
        ok = mb < mu < mb + type(mb)(eps)
        cases.append(Case(f"growth[{i}]", float(mb), float(mu), None, ok, eps))
    return cases


# ------------------------------------------------------------ projection


def _proj_pairs(sc: SuiteContext):
    ds = default_sets()
    hsets = sc.sets("hmg_sets", ds["hmg_sets"])
    qsets = sc.sets("quat_sets", ds["quat_sets"])
    return hsets, qsets


def suite_proj_hs_scaling(sc: SuiteContext) -> list[Case]:
    hsets, _ = _proj_pairs(sc)
    cases = []
    for a_idx, A in enumerate(hsets):
        for N in range(1, 9):
            pair = P.ProjectionPair("hmg", A, N, sc.cfg)
            hs = P.hs_norm_EAFN(pair)
            tag = f"A{a_idx + 1},N={N}"
            cases.append(rel_case(f"hs_frobenius[{tag}]", hs.predicted_linear, hs.frobenius_path, 1e-2))
            cases.append(rel_case(f"hs_kernel[{tag}]", hs.predicted_linear, hs.kernel_path, 1e-2))
            cases.append(rel_case(f"paths_agree[{tag}]", hs.frobenius_path, hs.kernel_path, 1e-2))
    return cases


def _lab_pairs(sc: SuiteContext) -> list[tuple[str, P.ProjectionPair]]:
    hsets, qsets = _proj_pairs(sc)
    return [
        ("hmg,A1,N=4", P.ProjectionPair("hmg", hsets[0], 4, sc.cfg)),
        ("hmg,A2,N=8", P.ProjectionPair("hmg", hsets[1 % len(hsets)], 8, sc.cfg)),
        ("quat,A,N=4", P.ProjectionPair("quat", qsets[0], 4, sc.cfg)),
    ]


def suite_proj_intersection(sc: SuiteContext) -> list[Case]:
    cases = []
    for tag, pair in _lab_pairs(sc):
        r = P.intersection_projection(pair)
        cases.append(bool_case(f"sigma_max<1[{tag}]", r.sigma_max, r.sigma_max < 1.0))
        cases.append(Case(f"limit_rank[{tag}]", 0, r.rank, None, r.rank == 0))
        cases.append(rel_case(f"decay_ratio[{tag}]", r.sigma_max**2, r.decay_ratio, 0.05))
        cases.append(bool_case(f"dim_bound[{tag}]", r.rank, r.rank <= floor(r.hs_sq), floor(r.hs_sq)))
    return cases


def suite_proj_annihilate(sc: SuiteContext) -> list[Case]:
    cases = []
    for tag, pair in _lab_pairs(sc):
        model = pair.model()
        C = P.annihilating_constant(pair, model)
        cases.append(bool_case(f"C>=1[{tag}]", C, C >= 1.0))
        chk = P.annihilation_checks(pair, 100, model=model)
        cases.append(Case(f"violations[{tag}]", 0, chk.violations, None, chk.violations == 0))
        pf = P.support_form_checks(pair, 20, model=model)
        cases.append(Case(f"support_form_violations[{tag}]", 0, pf.violations, None, pf.violations == 0))
        cert = P.bab_certificate(pair, model=model)
        cases.append(bool_case(f"bab_lower_bound[{tag}]", cert["perp_weyl_sq"], cert["bound_holds"], cert["lower_bound"]))
        cases.append(bool_case(f"bab_decay[{tag}]", cert["decay"][-1], cert["decays"], 0.0))
    return cases


def suite_proj_independence(sc: SuiteContext) -> list[Case]:
    cases = []
    hsets, qsets = _proj_pairs(sc)
    for tag, pair in (("hmg", P.ProjectionPair("hmg", hsets[0], 4, sc.cfg)), ("quat", P.ProjectionPair("quat", qsets[0], 4, sc.cfg))):
        fam = P.independent_family(pair, 3)
        cases.append(Case(f"gram_rank[{tag}]", 4, fam.rank, None, fam.rank == 4))
        cases.append(bool_case(f"steps_grow[{tag}]", min(fam.added), all(a > 0 for a in fam.added)))
    return cases


# ------------------------------------------------------------------ quat


def _quat_setup(sc: SuiteContext, s: float):
    param = Q.QuatParam(s)
    basis = Q.FockBasis(sc.cfg.fock_degree, param, sc.cfg.quat_quad_points)
    grid = gauss_grid_4d(sc.cfg.quat_quad_points, s)
    return param, basis, grid


def _quat_corpus(sc: SuiteContext, name: str, s: float, count: int = 20) -> list[Q.GaussPoly]:
    rng = sc.rng(name)
    deg = max(sc.cfg.fock_degree - 4, 0)
    return [Q.GaussPoly.random(rng, deg, s) for _ in range(count)]


def suite_quat_plancherel(sc: SuiteContext) -> list[Case]:
    cases = []
    a = sc.cfg.a_magnitude
    for s in (a, a / 2):
        param, basis, grid = _quat_setup(sc, s)
        polys = _quat_corpus(sc, f"quat-corpus-{s!r}", s)
        vals = np.stack([p(grid.nodes) for p in polys], axis=1)
        W = Q.weyl_a_batch(vals, grid, basis)
        ratios = []
        for i in range(len(polys)):
            g = Q.SampledFunction4(vals[:, i], grid)
            r = float(np.sum(np.abs(W[i]) ** 2)) / g.norm_sq()
            ratios.append(r)
            cases.append(rel_case(f"ratio[|a|={s:g}][{i}]", pi**2 / (4 * s * s), r, 1e-2))
        spread = (max(ratios) - min(ratios)) / np.mean(ratios)
        cases.append(abs_case(f"ratio_spread[|a|={s:g}]", 0.0, spread, 1e-2))
    return cases


def suite_quat_inversion(sc: SuiteContext) -> list[Case]:
    s = sc.cfg.a_magnitude
    param, basis, grid = _quat_setup(sc, s)
    polys = _quat_corpus(sc, f"quat-corpus-{s!r}", s)
    vals = np.stack([p(grid.nodes) for p in polys], axis=1)
    W = Q.weyl_a_batch(vals, grid, basis)
    cases = []
    for i in range(len(polys)):
        g = Q.SampledFunction4(vals[:, i], grid)
        rec = Q.SampledFunction4(Q.inversion_a_grid(W[i], grid, basis), grid)
        err = np.sqrt((rec - g).norm_sq() / g.norm_sq())
        cases.append(abs_case(f"roundtrip_l2[{i}]", 0.0, err, 1e-2))
    q = sc.rng("quat-inversion-linear").normal(size=4) * 0.3
    lin = abs(Q.inversion_a(3.0 * W[0], q, basis) - 3.0 * Q.inversion_a(W[0], q, basis))
    cases.append(abs_case("linearity", 0.0, lin, 1e-12))
    return cases


def _schur_quads(rng: np.random.Generator, basis: Q.FockBasis, count: int = 10):
    k = basis.low_block(max(basis.degree - 3, 1))
    quads = []
    for _ in range(count):
        v = [np.pad(_unit(rng, k), (0, basis.dim - k)) for _ in range(2)]
        w = [np.pad(_near(rng, x[:k]), (0, basis.dim - k)) for x in v]
        quads.append((v[0], v[1], w[0], w[1]))
    return quads


def suite_quat_schur(sc: SuiteContext) -> list[Case]:
    cases = []
    a = sc.cfg.a_magnitude
    means = {}
    for s in (a, 2 * a):
        param, basis, grid = _quat_setup(sc, s)
        quads = _schur_quads(sc.rng(f"quat-schur-{s!r}"), basis)
        mean, spread, _ = Q.schur_constant(quads, basis, grid)
        means[s] = mean
        cases.append(abs_case(f"spread[|a|={s:g}]", 0.0, spread, 1e-2))
        cases.append(bool_case(f"finite[|a|={s:g}]", mean, isfinite(mean) and mean > 0))
        if s == a:
            cases.append(abs_case("witness_norm", 1.0, basis.witness_norm(grid), 1e-6))
    cases.append(bool_case("scaling_ratio", means[2 * a] / means[a], isfinite(means[2 * a] / means[a])))
    return cases


def suite_quat_twisted(sc: SuiteContext) -> list[Case]:
    s = sc.cfg.a_magnitude
    param, basis, grid = _quat_setup(sc, s)
    rng = sc.rng("quat-twisted")
    deg = max(sc.cfg.fock_degree - 4, 0)
    out_grid = gauss_grid_4d(max(sc.cfg.quat_quad_points - 3, deg + 7), s)
    cases = []
    for i in range(3):
        h = Q.SampledFunction4.from_callable(Q.GaussPoly.random(rng, deg, s), grid)
        g = Q.SampledFunction4.from_callable(Q.GaussPoly.random(rng, deg, s), grid)
        wh = Q.weyl_a(Q.tilde(h), basis).entries
        wg = Q.weyl_a(g, basis).entries
        conv = Q.twisted_convolution_a(h, g, param, out_grid)
        wc = Q.weyl_a(conv, basis).entries
        err = np.linalg.norm(wh @ wg - wc) / (np.linalg.norm(wh) * np.linalg.norm(wg))
        cases.append(abs_case(f"convolution_identity[{i}]", 0.0, err, 1e-2))
        qt = rng.normal(size=4) * 0.2
        gl = Q.twisted_translate_a(g, qt, param)
        wl = Q.weyl_a(gl, basis).entries
        U, sv, _ = np.linalg.svd(wg)
        Ur = U[:, : int(np.sum(sv > 1e-8 * sv[0]))]
        resid = np.linalg.norm(wl - Ur @ (Ur.conj().T @ wl)) / np.linalg.norm(wl)
        cases.append(abs_case(f"translate_range_residual[{i}]", 0.0, resid, 1e-2))
    x, y = rng.normal(size=(100, 4)), rng.normal(size=(100, 4))
    diff = np.max(np.abs(Q.phase_pairing(x + y, y, param) - Q.phase_pairing(x, y, param)))
    cases.append(abs_case("phase_pairing_identity", 0.0, diff, 1e-12))
    return cases


SUITES: dict[str, Callable[[SuiteContext], list[Case]]] = {
    "hmg-plancherel": suite_hmg_plancherel,
    "hmg-inversion": suite_hmg_inversion,
    "hmg-wigner": suite_hmg_wigner,
    "hmg-peterweyl": suite_hmg_peterweyl,
    "proj-hs-scaling": suite_proj_hs_scaling,
    "proj-intersection": suite_proj_intersection,
    "proj-annihilate": suite_proj_annihilate,
    "proj-independence": suite_proj_independence,
    "sets-growth": suite_sets_growth,
    "quat-plancherel": suite_quat_plancherel,
    "quat-inversion": suite_quat_inversion,
    "quat-schur": suite_quat_schur,
    "quat-twisted": suite_quat_twisted,
}


def _config_echo(cfg: TruncationConfig, extras: dict) -> dict:
    d = {k: _fmt(v) if isinstance(v, float) else v for k, v in cfg.as_dict().items()}
    d.update({k: extras[k] for k in sorted(extras)})
    return d


def run_suite(
    name: str,
    cfg: TruncationConfig,
    extras: dict | None = None,
    base_dir: str | Path = ".",
    timing: bool = False,
) -> VerificationReport:
    """Run one suite (or ``all``) and return its report."""
    extras = dict(extras or {})
    sc = SuiteContext(cfg, extras, Path(base_dir))
    echo = _config_echo(cfg, extras)
    if name == "all":
        t0 = time.perf_counter()
        subs = [run_suite(n, cfg, extras, base_dir, timing) for n in SUITES]
        wall = time.perf_counter() - t0 if timing else None
        return VerificationReport("all", echo, [], wall, subs)
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}")
    t0 = time.perf_counter()
    cases = SUITES[name](sc)
    wall = time.perf_counter() - t0 if timing else None
    return VerificationReport(name, echo, cases, wall)
