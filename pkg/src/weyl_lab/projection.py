"""Two-projection engine: spatial cutoff E_A and operator-side cutoff F_N.

Both backends share one finite model.  The range of F_N is spanned by an
orthonormal family ``u_i`` (matrix coefficients of the representation,
scaled by the Plancherel factor).  The pair (E_A, F_N) leaves the subspace
``span{u_i, E_A u_i}`` invariant, and on it everything is determined by

    G[i, j] = int_A u_j conj(u_i),

so projections, norms, kernels and certificates are computed from ``G`` and
a quadrature of the ``u_i`` over A.  With ``P`` the orthogonal projector onto
the span, ``sigma_max(E_A F_N)^2 = lambda_max(G)`` and
``||E_A F_N||_HS^2 = tr G``.

For the Heisenberg motion group ``u_{r, j}(z, theta) = (2 pi)^{-1/2}
conj(rho_m(z, theta)[., j]) . psi_r``; for the quaternion group
``u_{r, alpha}(q) = (4|a|^2/pi^2)^{1/2} conj((psi_r^H pi_a(q))_alpha)``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import cached_property
from math import pi, sqrt
from typing import Sequence

import numpy as np

from . import hmg as H
from . import quat as Qm
from .gridsets import GridSet, Translate, enlargement_sequence, exact_measure
from .numerics import (
    TruncationConfig,
    eps_rank,
    gauss_legendre_cells,
    min_eigen_sym,
    op_norm,
    planar_grid,
    stable_sum,
)

__all__ = [
    "ProjectionPair",
    "PairModel",
    "AnnihilationCertificate",
    "apply_EA",
    "apply_FN",
    "kernel_EAFN",
    "hs_norm_EAFN",
    "intersection_projection",
    "independent_family",
    "annihilating_constant",
    "annihilation_checks",
    "support_form_checks",
    "bab_certificate",
    "certificate",
]

TWO_PI = 2.0 * pi
HMG_CELL_ORDER = 8
QUAT_CELL_ORDER = 4
QUAT_RANGE_EXTRA = 6
GRAM_REL_CUT = 1e-13


@dataclass(frozen=True)
class ProjectionPair:
    """Descriptor of ``(E_A, F_N)`` on one backend.

    ``range_vectors`` (shape ``(basis_dim, N)``, orthonormal columns) spans
    the operator-side subspace S; by default the first ``N`` basis vectors.
    """

    backend: str
    A: GridSet
    N: int
    cfg: TruncationConfig = field(default_factory=TruncationConfig)
    sector: int = 0
    a_magnitude: float | None = None
    range_vectors: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.backend not in ("hmg", "quat"):
            raise ValueError("backend must be 'hmg' or 'quat'")
        if self.N < 0:
            raise ValueError("N must be non-negative")
        want = 2 if self.backend == "hmg" else 4
        if self.A.dimension != want:
            raise ValueError(f"{self.backend} needs a {want}-dimensional set")

    @property
    def param(self) -> Qm.QuatParam:
        return Qm.QuatParam(self.a_magnitude or self.cfg.a_magnitude)

    @property
    def factor(self) -> float:
        """Plancherel factor: ``||g||^2 = factor * sum ||W(g)||_HS^2``."""
        return 1.0 / TWO_PI if self.backend == "hmg" else self.param.inversion_factor

    @property
    def measure(self) -> float:
        return float(exact_measure(self.A))

    def psi(self) -> np.ndarray:
        """Range vectors in the operator-side basis, shape ``(basis_dim, N)``."""
        dim = self.cfg.hermite_cutoff if self.backend == "hmg" else Qm.FockBasis(self.cfg.fock_degree, self.param).dim
        if self.range_vectors is not None:
            v = np.asarray(self.range_vectors, dtype=complex)
            out = np.zeros((dim, v.shape[1]), dtype=complex)
            out[: v.shape[0]] = v
            return out
        return np.eye(dim, self.N, dtype=complex)

    def model(self) -> "PairModel":
        return PairModel(self)


class PairModel:
    """Finite model of the pair on ``span{u_i, E_A u_i}``."""

    def __init__(self, pair: ProjectionPair):
        self.pair = pair
        psi = pair.psi()
        nz = np.nonzero(np.any(np.abs(psi) > 0, axis=1))[0]
        self.rows = int(nz.max()) + 1 if nz.size else 0
        self.psi = psi[: max(self.rows, 1)]
        if pair.backend == "hmg":
            self.cols = pair.cfg.hermite_cutoff
            self.freqs = np.tile(pair.sector + np.arange(self.cols), pair.N)
        else:
            self.range_basis = Qm.FockBasis(pair.cfg.fock_degree + QUAT_RANGE_EXTRA, pair.param, pair.cfg.quat_quad_points)
            self.cols = self.range_basis.dim
            self.freqs = None

    # ------------------------------------------------------------ functions

    @property
    def size(self) -> int:
        return self.pair.N * self.cols

    def _row_functions(self, points: np.ndarray) -> np.ndarray:
        """``f[node, beta, alpha]`` for ``beta < rows``: rho(z)[beta, alpha] without theta."""
        L = max(self.rows, 1)
        if self.pair.backend == "hmg":
            z = points[:, 0] + 1j * points[:, 1]
            return np.moveaxis(H.displacement_stack(z, self.cols)[:L], -1, 0)
        return Qm.pi_a_stack(points, self.range_basis, rows=L)

    def values(self, points: np.ndarray, chunk: int = 2000) -> np.ndarray:
        """``u_i`` at points (theta part excluded for hmg), shape ``(n, N * cols)``.

        Index ``i = r * cols + alpha``.
        """
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty((len(points), self.size), dtype=complex)
        scale = sqrt(self.pair.factor)
        for s in range(0, len(points), chunk):
            f = self._row_functions(points[s : s + chunk])
            u = np.einsum("br,nba->nra", self.psi, f.conj())
            out[s : s + chunk] = scale * u.reshape(len(u), -1)
        return out

    def gram(self, points: np.ndarray, weights: np.ndarray, chunk: int = 2000) -> np.ndarray:
        """``G[i, j] = sum_w u_j conj(u_i)``, with theta orthogonality for hmg."""
        parts = []
        for s in range(0, len(points), chunk):
            u = self.values(points[s : s + chunk])
            parts.append((u.conj().T * weights[s : s + chunk]) @ u)
        g = stable_sum(np.stack(parts)) if parts else np.zeros((self.size, self.size), complex)
        if self.freqs is not None:
            g = g * (self.freqs[:, None] == self.freqs[None, :])
        return 0.5 * (g + g.conj().T)

    def cell_rule(self) -> tuple[np.ndarray, np.ndarray]:
        A = self.pair.A
        order = HMG_CELL_ORDER if self.pair.backend == "hmg" else QUAT_CELL_ORDER
        if not len(A):
            return np.zeros((0, A.dimension)), np.zeros(0)
        return gauss_legendre_cells(A.lows(), A.cell_size, order)

    @cached_property
    def G(self) -> np.ndarray:
        if self.size == 0:
            return np.zeros((0, 0), dtype=complex)
        nodes, w = self.cell_rule()
        return self.gram(nodes, w)

    @cached_property
    def full_gram(self) -> np.ndarray:
        """``int conj(u_i) u_j`` over the whole space (the identity up to quadrature)."""
        if self.pair.backend == "hmg":
            return self._hmg_full_gram()
        return self._quat_full_gram()

    def _hmg_full_gram(self) -> np.ndarray:
        cfg = self.pair.cfg
        L = max(self.rows, 1)
        rows = _hmg_row_gram(cfg.hermite_cutoff, cfg.proj_quad_radius, cfg.proj_quad_points, L)  # [alpha, beta, delta]
        c = self.pair.factor
        # int conj(u_{r alpha}) u_{s alpha} = c sum conj(psi[b, r]) psi[d, s] conj(rows[alpha, b, d])
        blocks = c * np.einsum("br,abd,ds->ars", self.psi.conj(), rows.conj(), self.psi)
        N, M = self.pair.N, self.cols
        out = np.zeros((N, M, N, M), dtype=complex)
        idx = np.arange(M)
        out[:, idx, :, idx] = blocks
        return out.reshape(N * M, N * M)

    def _quat_full_gram(self) -> np.ndarray:
        # pi_a factorises over (z1, z2), so the R^4 Gram is a product of two
        # one-variable Grams computed on a 2D Gauss-Hermite rule.
        basis = self.range_basis
        s = basis.param.s
        deg = basis.degree
        pts = deg + int(max(sum(basis.exponents[b]) for b in range(max(self.rows, 1)))) + 2
        t, w = np.polynomial.hermite.hermgauss(pts)
        x, wx = t / np.sqrt(2.0 * s), w / np.sqrt(2.0 * s)
        X, Y = np.meshgrid(x, x, indexing="ij")
        zeta = (X + 1j * Y).ravel()
        ww = (wx[:, None] * wx[None, :]).ravel() * np.exp(2.0 * s * np.abs(zeta) ** 2)
        e = Qm._one_variable_stable(zeta, deg, s)  # [b, a, n]
        g1 = np.einsum("ban,n,dcn->badc", e.conj(), ww, e)  # conj(e[b,a]) e[d,c]
        ex = np.array(basis.exponents)
        L = max(self.rows, 1)
        bp, br = ex[:L, 0], ex[:L, 1]
        ap, ar = ex[:, 0], ex[:, 1]
        gf = (
            g1[bp[:, None, None, None], ap[None, :, None, None], bp[None, None, :, None], ap[None, None, None, :]]
            * g1[br[:, None, None, None], ar[None, :, None, None], br[None, None, :, None], ar[None, None, None, :]]
        )  # [beta, alpha, beta', alpha'] = int conj f_{beta alpha} f_{beta' alpha'}
        # u_{r alpha} = sqrt(c) sum_beta psi[beta, r] conj f_{beta alpha}
        c = self.pair.factor
        out = c * np.einsum("br,badc,ds->rasc", self.psi.conj(), gf.conj(), self.psi)
        n = self.size
        return out.reshape(n, n)

    # ---------------------------------------------------------- finite model

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates ``R`` of ``[u_1..u_n, E u_1..E u_n]`` in an orthonormal basis."""
        n = self.size
        G = self.G
        gam = np.block([[np.eye(n), G], [G, G]])
        lam, V = np.linalg.eigh(gam)
        keep = lam > GRAM_REL_CUT * max(lam.max(), 1.0)
        return np.sqrt(lam[keep])[:, None] * V[:, keep].conj().T

    @cached_property
    def F(self) -> np.ndarray:
        Ru = self.coords[:, : self.size]
        return Ru @ Ru.conj().T

    @cached_property
    def E(self) -> np.ndarray:
        Re = self.coords[:, self.size :]
        if Re.size == 0:
            return np.zeros((self.coords.shape[0],) * 2, dtype=complex)
        U, sv, _ = np.linalg.svd(Re, full_matrices=False)
        k = int(np.sum(sv > 1e-7 * max(sv.max(), 1e-300))) if sv.size else 0
        Uk = U[:, :k]
        return Uk @ Uk.conj().T

    @property
    def dim(self) -> int:
        return self.coords.shape[0]

    def EF(self) -> np.ndarray:
        return self.E @ self.F


_ROW_GRAM_CACHE: dict = {}


def _hmg_row_gram(M: int, radius: float, points: int, L: int) -> np.ndarray:
    """``int conj(D[b, a](z)) D[d, a](z) dz`` over the wide planar grid, shape ``(M, L, L)``.

    At least eight rows are computed and cached, so a sweep over N reuses one pass.
    """
    key = (M, radius, points)
    cached = _ROW_GRAM_CACHE.get(key)
    if cached is None or cached.shape[1] < L:
        rows = max(L, 8)
        grid = planar_grid(radius, points)
        z = grid.nodes[:, 0] + 1j * grid.nodes[:, 1]
        parts = []
        for s in range(0, z.size, 4000):
            d = H.displacement_stack(z[s : s + 4000], M)[:rows]  # [b, a, n]
            w = grid.weights[s : s + 4000]
            parts.append(np.einsum("ban,n,dan->abd", d.conj(), w, d))
        _ROW_GRAM_CACHE.clear()
        cached = _ROW_GRAM_CACHE[key] = stable_sum(np.stack(parts))
    return cached[:, :L, :L]


# ---------------------------------------------------------------- operations


def _indicator(pair: ProjectionPair, points: np.ndarray) -> np.ndarray:
    return pair.A.contains(points).astype(float)


def apply_EA(g, pair: ProjectionPair):
    """Multiply a sampled function by the indicator of A (of A x K for hmg)."""
    if isinstance(g, H.SampledFunction2):
        h = 2.0 * g.radius / g.points
        x = -g.radius + (np.arange(g.points) + 0.5) * h
        X, Y = np.meshgrid(x, x, indexing="ij")
        chi = _indicator(pair, np.column_stack([X.ravel(), Y.ravel()]))
        return H.SampledFunction2(g.values * chi[:, None], g.radius, g.points)
    if isinstance(g, Qm.SampledFunction4):
        chi = _indicator(pair, g.grid.nodes)
        return Qm.SampledFunction4(g.values * chi, g.grid)
    raise TypeError("unsupported sampled function")


def apply_FN(g, pair: ProjectionPair, ctx: H.HMGContext | None = None):
    """Transform, keep ``P_S W`` (in sector ``sector`` only for hmg), and invert."""
    psi = pair.psi()
    P = psi @ psi.conj().T
    if isinstance(g, H.SampledFunction2):
        ctx = ctx or H.HMGContext.from_config(pair.cfg)
        w = H.weyl_transform(ctx, g, pair.sector).entries
        return H.synthesize(ctx, {pair.sector: P @ w}).scaled(1.0 / TWO_PI)
    if isinstance(g, Qm.SampledFunction4):
        basis = Qm.FockBasis(pair.cfg.fock_degree, pair.param, pair.cfg.quat_quad_points)
        w = Qm.weyl_a(g, basis).entries
        return Qm.SampledFunction4(Qm.inversion_a_grid(P @ w, g.grid, basis), g.grid)
    raise TypeError("unsupported sampled function")


def kernel_EAFN(pair: ProjectionPair, p1, p2, model: PairModel | None = None) -> complex:
    """``K(p1, p2) = factor * chi_A(p1) tr(P_S rep(p2) rep(p1)^*)``.

    hmg points are :class:`HMGPoint`; quat points are length-4 vectors.
    """
    psi = pair.psi()
    P = psi @ psi.conj().T
    if pair.backend == "hmg":
        z1 = np.array([[p1.z.real, p1.z.imag]])
        if not pair.A.contains(z1)[0]:
            return 0.0j
        M = pair.cfg.hermite_cutoff
        r1 = H.rho_matrix(pair.sector, p1, M).entries
        r2 = H.rho_matrix(pair.sector, p2, M).entries
        return complex(np.trace(P @ r2 @ r1.conj().T) / TWO_PI)
    q1 = np.asarray(p1, dtype=float)
    if not pair.A.contains(q1[None, :])[0]:
        return 0.0j
    basis = Qm.FockBasis(pair.cfg.fock_degree + QUAT_RANGE_EXTRA, pair.param)
    Pb = np.zeros((basis.dim, basis.dim), dtype=complex)
    Pb[: P.shape[0], : P.shape[0]] = P
    a1 = Qm.pi_a_stack(q1[None, :], basis)[0]
    a2 = Qm.pi_a_stack(np.asarray(p2, float)[None, :], basis)[0]
    return complex(pair.factor * np.trace(Pb @ a2 @ a1.conj().T))


@dataclass(frozen=True)
class HSNorms:
    kernel_path: float
    frobenius_path: float
    predicted_linear: float

    @property
    def agreement(self) -> float:
        return abs(self.kernel_path - self.frobenius_path) / max(abs(self.frobenius_path), 1e-300)


def hs_norm_EAFN(pair: ProjectionPair, model: PairModel | None = None) -> HSNorms:
    """``||E_A F_N||_HS^2`` two ways.

    (i) double quadrature of ``|K|^2``: the inner integral over the whole
    group uses the full-space Gram of the ``u_i``, the outer one the cell rule
    on A.  (ii) squared Frobenius norm of ``E F`` in the finite model.
    The third field is ``factor * m(A) * N``.
    """
    model = model or PairModel(pair)
    if model.size == 0 or len(pair.A) == 0:
        return HSNorms(0.0, 0.0, 0.0)
    nodes, w = model.cell_rule()
    gam = model.full_gram
    acc = []
    for s in range(0, len(nodes), 2000):
        u = model.values(nodes[s : s + 2000])
        if model.freqs is not None:
            acc.append(_masked_quadratic(u, gam, model.freqs, w[s : s + 2000]))
        else:
            acc.append(np.sum(w[s : s + 2000] * np.sum((u @ gam) * u.conj(), axis=1)))
    kernel = float(np.real(stable_sum(np.array(acc))))
    ef = model.EF()
    frob = float(np.sum(np.abs(ef) ** 2))
    return HSNorms(kernel, frob, pair.factor * pair.measure * pair.N)


def _masked_quadratic(u: np.ndarray, gam: np.ndarray, freqs: np.ndarray, w: np.ndarray) -> complex:
    total = 0.0j
    for f in np.unique(freqs):
        idx = np.nonzero(freqs == f)[0]
        ub = u[:, idx]
        total += np.sum(w * np.sum((ub @ gam[np.ix_(idx, idx)]) * ub.conj(), axis=1))
    return total


@dataclass(frozen=True)
class IntersectionResult:
    rank: int
    hs_sq: float
    sigma_max: float
    decay: list
    decay_ratio: float

    @property
    def ratio_error(self) -> float:
        return abs(self.decay_ratio - self.sigma_max**2) / max(self.sigma_max**2, 1e-300)


def intersection_projection(
    pair: ProjectionPair, iters: int = 400, seed: int | None = None, model: PairModel | None = None
) -> IntersectionResult:
    """Alternating projections ``T = F E F``.

    The rank of ``T^iters`` uses an absolute singular-value threshold of
    ``1e-6``: the limit is a projection, so its nonzero singular values are 1.
    ``decay`` records ``||T^k g||`` for a seeded start; the final ratio of
    consecutive norms estimates ``sigma_max(E F)^2``.
    """
    model = model or PairModel(pair)
    seed = pair.cfg.seed if seed is None else seed
    if model.size == 0 or len(pair.A) == 0:
        return IntersectionResult(0, 0.0, 0.0, [0.0], 0.0)
    E, F = model.E, model.F
    T = F @ E @ F
    sig = op_norm(E @ F, tol=1e-13, seed=seed)
    Tk = np.linalg.matrix_power(T, iters)
    rank = int(np.sum(np.linalg.svd(Tk, compute_uv=False) > 1e-6))
    rng = np.random.default_rng(seed)
    g = rng.normal(size=model.dim) + 1j * rng.normal(size=model.dim)
    g = F @ g
    # renormalise every step; the recorded norms are running products
    nrm = float(np.linalg.norm(g))
    decay = [nrm]
    ratio = 0.0
    if nrm > 0:
        g = g / nrm
        for _ in range(iters):
            g = T @ g
            ratio = float(np.linalg.norm(g))
            if ratio == 0.0:
                break
            g = g / ratio
            decay.append(decay[-1] * ratio)
    hs_sq = float(np.sum(np.abs(E @ F) ** 2))
    return IntersectionResult(rank, hs_sq, sig, decay, ratio)


# ---------------------------------------------------------- independence


@dataclass(frozen=True)
class FamilyResult:
    rank: int
    gram: np.ndarray
    translates: list
    added: list


def _top_vector(model: PairModel) -> np.ndarray:
    lam, V = np.linalg.eigh(model.G)
    return V[:, -1]


def _translated_values(pair: ProjectionPair, model: PairModel, c: np.ndarray, w: Translate, pts: np.ndarray) -> np.ndarray:
    """Twisted translate of ``g0 = E_A sum c_i u_i`` at points (theta excluded for hmg).

    For hmg the result is ``(n, N*cols)`` per-term values summed later per
    frequency; for quat it is ``(n,)``.
    """
    off = np.asarray(w.offset)
    back = pts - off
    chi = pair.A.contains(back).astype(float)
    u = model.values(back) * c[None, :]
    if pair.backend == "hmg":
        z = pts[:, 0] + 1j * pts[:, 1]
        wc = complex(off[0], off[1])
        phase = np.exp(0.5j * (z * np.conj(wc)).imag)
        return (phase * chi)[:, None] * u
    phase = np.exp(2j * Qm.phase_pairing(pts, np.broadcast_to(off, pts.shape), pair.param))
    return phase * chi * u.sum(axis=1)


def _box_intersections(pair: ProjectionPair, wa: Translate, wb: Translate):
    h = pair.A.cell_size
    lows = pair.A.lows()
    la, lb = lows + np.asarray(wa.offset), lows + np.asarray(wb.offset)
    for a in la:
        lo = np.maximum(a, lb)
        hi = np.minimum(a + h, lb + h)
        ok = np.all(hi > lo, axis=1)
        for l0, h0 in zip(lo[ok], hi[ok]):
            yield l0, h0


def _box_rule(lo: np.ndarray, hi: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    t, w = np.polynomial.legendre.leggauss(order)
    axes = [0.5 * (b - a) * (t + 1) + a for a, b in zip(lo, hi)]
    ws = [0.5 * (b - a) * w for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    wm = np.meshgrid(*ws, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh]), np.prod(np.column_stack([m.ravel() for m in wm]), axis=1)


def independent_family(
    pair: ProjectionPair, s: int = 3, eps_total: float | None = None, model: PairModel | None = None
) -> FamilyResult:
    """Gram rank of ``g_0, ..., g_s`` built from growth translates of A.

    ``g_0 = E_A sum c_i u_i`` with ``c`` the top eigenvector of ``G`` (the
    near-intersection vector); ``g_l`` is its twisted translate by ``w_l``
    from :func:`enlargement_sequence` with ``B = B_0 = A``.  Gram entries are
    integrated exactly piecewise over the overlaps of translated cells.
    """
    model = model or PairModel(pair)
    if model.size == 0 or len(pair.A) == 0:
        return FamilyResult(0, np.zeros((0, 0)), [], [])
    c = _top_vector(model)
    dim = pair.A.dimension
    trans = [Translate((0.0,) * dim)]
    added = []
    if s > 0:
        steps = enlargement_sequence(pair.A, pair.A, eps_total if eps_total is not None else pair.measure, s)
        trans += [st.translate for st in steps]
        added = [st.added for st in steps]
    order = HMG_CELL_ORDER if pair.backend == "hmg" else QUAT_CELL_ORDER
    n = len(trans)
    gram = np.zeros((n, n), dtype=complex)
    for a in range(n):
        for b in range(a, n):
            rules = [_box_rule(lo, hi, order) for lo, hi in _box_intersections(pair, trans[a], trans[b])]
            if not rules:
                continue
            pts = np.concatenate([r[0] for r in rules])
            w = np.concatenate([r[1] for r in rules])
            ga = _translated_values(pair, model, c, trans[a], pts)
            gb = _translated_values(pair, model, c, trans[b], pts)
            if pair.backend == "hmg":
                val = 0.0j
                for f in np.unique(model.freqs):
                    idx = model.freqs == f
                    val += stable_sum(w * ga[:, idx].sum(1) * gb[:, idx].sum(1).conj())
                gram[a, b] = val
            else:
                gram[a, b] = stable_sum(w * ga * gb.conj())
            gram[b, a] = np.conj(gram[a, b])
    return FamilyResult(eps_rank(gram, 1e-6), gram, trans, added)


# ----------------------------------------------------- annihilating pairs


class TruncationBreakdown(RuntimeError):
    """``sigma_max(E_A F_N)`` is numerically 1."""


def annihilating_constant(pair: ProjectionPair, model: PairModel | None = None, tol: float = 1e-10) -> float:
    """``C = 1 / lambda_min(E_A^perp + F_N^perp)`` on the discretized space.

    On the orthogonal complement of the model subspace both complements act
    as the identity, giving eigenvalue 2, so only values below 1 from the
    model matter; the result is ``1 / min(lambda_model, 1)``.
    """
    model = model or PairModel(pair)
    if model.size == 0:
        return 1.0
    # dense SVD: power iteration stalls when the top singular values cluster near 1
    sig = float(np.linalg.norm(model.EF(), 2))
    if sig >= 1.0 - tol:
        raise TruncationBreakdown(f"sigma_max = {sig!r}")
    I = np.eye(model.dim)
    S = 2.0 * I - model.E - model.F
    lam = min_eigen_sym(0.5 * (S + S.conj().T))
    return 1.0 / min(lam, 1.0)


@dataclass(frozen=True)
class CheckResult:
    count: int
    violations: int
    worst_slack: float


def annihilation_checks(pair: ProjectionPair, count: int = 100, seed: int | None = None, model: PairModel | None = None) -> CheckResult:
    """``||g||^2 <= C (||E^perp g||^2 + ||F^perp g||^2)`` for seeded ``g`` in the model space."""
    model = model or PairModel(pair)
    C = annihilating_constant(pair, model)
    rng = np.random.default_rng(pair.cfg.seed if seed is None else seed)
    E, F = model.E, model.F
    viol, worst = 0, np.inf
    for _ in range(count):
        g = rng.normal(size=model.dim) + 1j * rng.normal(size=model.dim)
        lhs = float(np.vdot(g, g).real)
        eg, fg = g - E @ g, g - F @ g
        rhs = C * float(np.vdot(eg, eg).real + np.vdot(fg, fg).real)
        slack = (rhs - lhs) / lhs
        worst = min(worst, slack)
        if slack < -1e-12:
            viol += 1
    return CheckResult(count, viol, float(worst))


def support_form_checks(pair: ProjectionPair, count: int = 20, seed: int | None = None, model: PairModel | None = None) -> CheckResult:
    """For ``g = E_A sum c_i u_i`` (so the integral over the complement of A is 0):
    ``||g||^2 <= C * factor * ||P_S^perp W(g)||_HS^2``.

    ``||g||^2`` and the coefficients ``<g, u_i>`` (which give ``P_S W(g)``)
    are integrated by the cell rule on A; ``factor ||W(g)||^2 = ||g||^2`` by
    Plancherel.
    """
    model = model or PairModel(pair)
    C = annihilating_constant(pair, model)
    rng = np.random.default_rng((pair.cfg.seed if seed is None else seed) + 1)
    nodes, w = model.cell_rule()
    U = model.values(nodes)
    viol, worst = 0, np.inf
    for _ in range(count):
        c = rng.normal(size=model.size) + 1j * rng.normal(size=model.size)
        if model.freqs is None:
            gv = U @ c
            norm_sq = float(np.real(stable_sum(w * np.abs(gv) ** 2)))
            coef = (U.conj().T * w) @ gv
        else:
            coef = np.zeros(model.size, dtype=complex)
            norm_sq = 0.0
            for f in np.unique(model.freqs):
                idx = model.freqs == f
                gv = U[:, idx] @ c[idx]
                norm_sq += float(np.real(stable_sum(w * np.abs(gv) ** 2)))
                coef[idx] = (U[:, idx].conj().T * w) @ gv
        ps_w = float(np.sum(np.abs(coef) ** 2)) / pair.factor
        perp = norm_sq / pair.factor - ps_w
        rhs = C * pair.factor * perp
        slack = (rhs - norm_sq) / norm_sq
        worst = min(worst, slack)
        if slack < -1e-10:
            viol += 1
    return CheckResult(count, viol, float(worst))


def bab_certificate(pair: ProjectionPair, g: np.ndarray | None = None, iters: int = 50, model: PairModel | None = None) -> dict:
    """Lower bound ``||P^perp W(g)||^2 >= ||g||^2 / (C factor)`` and decay of ``(F E)^k g``.

    ``g`` is given in model coordinates and is first cut to A; by default
    ``g = E F h`` for a seeded ``h``.
    """
    model = model or PairModel(pair)
    E, F = model.E, model.F
    if g is None:
        rng = np.random.default_rng(pair.cfg.seed + 2)
        h = rng.normal(size=model.dim) + 1j * rng.normal(size=model.dim)
        g = E @ F @ h
    g = E @ np.asarray(g, dtype=complex)
    C = annihilating_constant(pair, model)
    nrm = float(np.vdot(g, g).real)
    fg = F @ g
    perp_w = (nrm - float(np.vdot(fg, fg).real)) / pair.factor
    bound = nrm / (C * pair.factor)
    decay = [float(np.linalg.norm(g))]
    x = g
    for _ in range(iters):
        x = F @ (E @ x)
        decay.append(float(np.linalg.norm(x)))
    return {
        "norm_sq": nrm,
        "perp_weyl_sq": perp_w,
        "lower_bound": bound,
        "bound_holds": bool(perp_w >= bound * (1 - 1e-10)),
        "decay": decay,
        "decays": bool(decay[-1] <= decay[0] * 0.5 or decay[0] == 0.0),
    }


@dataclass(frozen=True)
class AnnihilationCertificate:
    sigma_max: float
    hs_norm_sq: float
    predicted_hs_norm_sq: float
    annihilating_constant: float
    residual_decay: list
    passes_sigma: bool
    passes_hs: bool
    passes_rank: bool

    def to_json(self) -> str:
        d = asdict(self)
        d["residual_decay"] = [float(f"{v:.12g}") for v in self.residual_decay]
        for k in ("sigma_max", "hs_norm_sq", "predicted_hs_norm_sq", "annihilating_constant"):
            d[k] = float(f"{d[k]:.12g}")
        return json.dumps(d, sort_keys=True)


def certificate(pair: ProjectionPair, iters: int = 200) -> AnnihilationCertificate:
    model = PairModel(pair)
    inter = intersection_projection(pair, iters, model=model)
    C = annihilating_constant(pair, model)
    pred = pair.factor * pair.measure * pair.N
    return AnnihilationCertificate(
        inter.sigma_max,
        inter.hs_sq,
        pred,
        C,
        inter.decay[:: max(1, len(inter.decay) // 20)],
        inter.sigma_max < 1.0,
        abs(inter.hs_sq - pred) <= 1e-2 * max(pred, 1e-300),
        inter.rank == 0,
    )
