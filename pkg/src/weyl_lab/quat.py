"""Quaternion Heisenberg group at a = |a| i in the complex Fock model.

Conventions
-----------
* ``q = q0 + q1 i + q2 j + q3 k`` is stored as a length-4 real vector.
* Right multiplication by ``i`` is complex-linear in the coordinates
  ``z1 = q0 + i q1`` and ``z2 = q2 - i q3``; with this choice the
  multiplier of ``pi_a`` is holomorphic in the Fock variable.
* ``pi_a(q) F(x) = exp(-s|q|^2 - 2 s (x1 conj z1 + x2 conj z2)) F(x + q)``,
  ``s = |a|``, unitary on the Fock space with weight ``exp(-2 s |x|^2)``.
  It satisfies ``pi_a(p) pi_a(q) = exp(2 i <pa, q>) pi_a(p + q)``.
* Fock basis: ``e_{p,r} = z1^p z2^r / ||z1^p z2^r||`` ordered by total degree,
  then by decreasing ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, factorial, pi
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .hmg import displacement_stack
from .numerics import OperatorMatrix, QuadratureGrid, gauss_grid_4d, stable_sum

__all__ = [
    "QuatParam",
    "FockBasis",
    "GaussPoly",
    "SampledFunction4",
    "qmul",
    "phase_pairing",
    "complex_coords",
    "pi_a_matrix",
    "pi_a_stack",
    "weyl_a",
    "weyl_a_batch",
    "inversion_a",
    "inversion_a_grid",
    "schur_constant",
    "tilde",
    "twisted_convolution_a",
    "twisted_translate_a",
]


@dataclass(frozen=True)
class QuatParam:
    a_magnitude: float

    def __post_init__(self) -> None:
        if not self.a_magnitude > 0:
            raise ValueError("|a| must be positive")

    @property
    def s(self) -> float:
        return float(self.a_magnitude)

    @property
    def vector(self) -> np.ndarray:
        return np.array([0.0, self.s, 0.0, 0.0])

    @property
    def inversion_factor(self) -> float:
        """``4|a|^2 / pi^2``: the factor in front of the inversion trace."""
        return 4.0 * self.s**2 / pi**2


# ------------------------------------------------------------ quaternion algebra


def qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product along the last axis."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    a0, a1, a2, a3 = np.moveaxis(p, -1, 0)
    b0, b1, b2, b3 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ],
        axis=-1,
    )


def phase_pairing(qt: np.ndarray, q: np.ndarray, param: QuatParam) -> np.ndarray:
    """``<qt a, q> = Re(conj(qt a) q)``, the Euclidean inner product in R^4."""
    return np.sum(qmul(qt, np.broadcast_to(param.vector, np.shape(qt))) * np.asarray(q, float), axis=-1)


def complex_coords(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * q[..., 1], q[..., 2] - 1j * q[..., 3]


# ---------------------------------------------------------------- Fock basis


def _exponents(degree: int) -> list[tuple[int, int]]:
    return [(p, d - p) for d in range(degree + 1) for p in range(d, -1, -1)]


@dataclass(frozen=True)
class FockBasis:
    """Normalised monomials of total degree ``<= degree``.

    One-variable norms ``int |z|^{2p} e^{-2s|z|^2}`` are integrated on the
    Gauss-Hermite grid; they factor the two-variable norms.
    """

    degree: int
    param: QuatParam
    points: int = 12
    exponents: tuple = field(init=False)
    norms_1d: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        object.__setattr__(self, "exponents", tuple(_exponents(self.degree)))
        rate = 2.0 * self.param.s
        n = max(self.points, self.degree + 2)
        t, w = np.polynomial.hermite.hermgauss(n)
        x, wx = t / np.sqrt(rate), w / np.sqrt(rate)
        r2 = (x[:, None] ** 2 + x[None, :] ** 2).ravel()
        ww = (wx[:, None] * wx[None, :]).ravel()
        norms = np.array([stable_sum(ww * r2**p) for p in range(self.degree + 1)])
        object.__setattr__(self, "norms_1d", norms)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    @property
    def coeffs_1d(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.norms_1d)

    def index(self, p: int, r: int) -> int:
        return self.exponents.index((p, r))

    def low_block(self, degree: int) -> int:
        """Number of basis vectors of total degree ``<= degree``."""
        return (degree + 1) * (degree + 2) // 2

    def evaluate(self, q: np.ndarray) -> np.ndarray:
        """Basis values at points ``q`` (shape ``(n, 4)``), returns ``(n, dim)``."""
        z1, z2 = complex_coords(np.atleast_2d(q))
        c = self.coeffs_1d
        cols = [c[p] * c[r] * z1**p * z2**r for p, r in self.exponents]
        return np.stack(cols, axis=-1)

    def gram(self, grid: QuadratureGrid) -> np.ndarray:
        """Quadrature Gram matrix against the Fock weight (``grid`` carries the weight)."""
        v = self.evaluate(grid.nodes)
        return (v.conj().T * grid.weights) @ v

    def witness_norm(self, grid: QuadratureGrid) -> float:
        """``||(4|a|^2/pi) z1 z2||`` on the grid."""
        z1, z2 = complex_coords(grid.nodes)
        f = (4.0 * self.param.s**2 / pi) * z1 * z2
        return float(np.sqrt(stable_sum(grid.weights * np.abs(f) ** 2)))


# ----------------------------------------------------------- representation


def _one_variable(zeta: np.ndarray, degree: int, s: float, coeffs: np.ndarray) -> np.ndarray:
    """``<pi(zeta) e_a, e_b>`` in one variable without the Gaussian factor.

    Shape ``(degree+1, degree+1, n)`` indexed ``[b, a]``.
    """
    n = zeta.size
    zp = np.ones((degree + 1, n), dtype=complex)
    bp = np.ones((degree + 1, n), dtype=complex)
    for k in range(1, degree + 1):
        zp[k] = zp[k - 1] * zeta
        bp[k] = bp[k - 1] * (-2.0 * s * zeta.conj())
    out = np.zeros((degree + 1, degree + 1, n), dtype=complex)
    for a in range(degree + 1):
        for b in range(degree + 1):
            acc = np.zeros(n, dtype=complex)
            for k in range(min(a, b) + 1):
                acc += comb(a, k) / factorial(b - k) * zp[a - k] * bp[b - k]
            out[b, a] = coeffs[a] / coeffs[b] * acc
    return out


def _one_variable_stable(zeta: np.ndarray, degree: int, s: float) -> np.ndarray:
    """One-variable matrix including the Gaussian factor.

    In one variable ``pi_a(zeta)`` is the displacement operator with
    parameter ``-sqrt(2s) conj(zeta)``, so the Laguerre recurrence of
    :func:`weyl_lab.hmg.displacement_stack` applies.
    """
    beta = -np.sqrt(2.0 * s) * np.conj(zeta)
    return displacement_stack(-1j * np.sqrt(2.0) * beta, degree + 1)


def pi_a_stack(q: np.ndarray, basis: FockBasis, method: str = "closed", rows: int | None = None) -> np.ndarray:
    """``[<pi_a(q) e_alpha, e_beta>]`` for many ``q``; shape ``(n, dim, dim)`` as ``[node, beta, alpha]``.

    ``method="taylor"`` sums the finite binomial expansion directly; it is
    exact in exact arithmetic but loses digits at high degree.  ``rows``
    keeps only the first rows (output index ``beta``).
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    s = basis.param.s
    z1, z2 = complex_coords(q)
    if method == "closed":
        e1 = _one_variable_stable(z1, basis.degree, s)
        e2 = _one_variable_stable(z2, basis.degree, s)
        gauss = 1.0
    elif method == "taylor":
        e1 = _one_variable(z1, basis.degree, s, basis.coeffs_1d)
        e2 = _one_variable(z2, basis.degree, s, basis.coeffs_1d)
        gauss = np.exp(-s * np.sum(q * q, axis=1))
    else:
        raise ValueError(f"unknown method {method!r}")
    p = np.array([e[0] for e in basis.exponents])
    r = np.array([e[1] for e in basis.exponents])
    L = basis.dim if rows is None else rows
    mat = e1[p[:L, None], p[None, :]] * e2[r[:L, None], r[None, :]]  # [beta, alpha, n]
    return np.moveaxis(mat * gauss, -1, 0)


def _pi_a_quadrature(q: np.ndarray, basis: FockBasis, points: int) -> np.ndarray:
    s = basis.param.s
    grid = gauss_grid_4d(points, s)
    x = grid.nodes
    z1, z2 = complex_coords(q)
    x1, x2 = complex_coords(x)
    mult = np.exp(-s * np.dot(q, q) - 2.0 * s * (x1 * np.conj(z1) + x2 * np.conj(z2)))
    shifted = basis.evaluate(x + q) * mult[:, None]
    plain = basis.evaluate(x)
    return (plain.conj().T * grid.weights) @ shifted


def pi_a_matrix(q: Sequence[float], basis: FockBasis, method: str = "closed", points: int = 14) -> OperatorMatrix:
    """Matrix ``[<pi_a(q) e_alpha, e_beta>]_{beta, alpha}`` over the Fock basis.

    ``method="quadrature"`` integrates the defining formula on a Gauss grid
    and ``method="taylor"`` expands ``e^{-2s x conj(zeta)} (x + zeta)^a``.
    """
    q = np.asarray(q, dtype=float)
    if method in ("closed", "taylor"):
        mat = pi_a_stack(q[None, :], basis, method)[0]
    elif method == "quadrature":
        mat = _pi_a_quadrature(q, basis, points)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OperatorMatrix(mat, "fock")


# -------------------------------------------------------- sampled functions


@dataclass(frozen=True)
class GaussPoly:
    """``sum_e c_e u^e exp(-rate sum_k u_k^2)`` with ``u = q - center``.

    Entire in ``q``: complex arguments give the analytic continuation, which
    :func:`twisted_convolution_a` uses to shift its integration contour.
    """

    exps: np.ndarray
    coefs: np.ndarray
    rate: float
    center: tuple = (0.0, 0.0, 0.0, 0.0)
    analytic = True

    def __call__(self, q: np.ndarray) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q))
        u = np.ascontiguousarray((q - np.asarray(self.center)).T)  # (4, n)
        top = int(self.exps.max()) if self.exps.size else 0
        pw = np.ones((4, top + 1, u.shape[1]), dtype=u.dtype)
        for k in range(1, top + 1):
            pw[:, k] = pw[:, k - 1] * u
        e = self.exps
        mono = pw[0, e[:, 0]] * pw[1, e[:, 1]] * pw[2, e[:, 2]] * pw[3, e[:, 3]]
        if np.iscomplexobj(mono):
            poly = self.coefs @ mono
        else:
            poly = (self.coefs.real @ mono) + 1j * (self.coefs.imag @ mono)
        return poly * np.exp(-self.rate * np.einsum("kn,kn->n", u, u))

    def tilde(self) -> "GaussPoly":
        """``conj h(-q)`` as another Gaussian polynomial."""
        sign = (-1.0) ** self.exps.sum(axis=1)
        return GaussPoly(self.exps, sign * self.coefs.conj(), self.rate, tuple(-np.asarray(self.center, float)))

    @classmethod
    def random(cls, rng: np.random.Generator, degree: int, rate: float) -> "GaussPoly":
        exps = [e for e in np.ndindex(degree + 1, degree + 1, degree + 1, degree + 1) if sum(e) <= degree]
        exps = np.array(exps, dtype=int)
        coefs = rng.normal(size=len(exps)) + 1j * rng.normal(size=len(exps))
        return cls(exps, coefs, rate)


@dataclass(frozen=True)
class SampledFunction4:
    """Plain function values on the 4-space Gauss grid.

    ``source`` optionally keeps an exact callable so the function can be
    evaluated away from the grid.
    """

    values: np.ndarray
    grid: QuadratureGrid = field(repr=False)
    source: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @classmethod
    def from_callable(cls, f: Callable, grid: QuadratureGrid) -> "SampledFunction4":
        return cls(f(grid.nodes), grid, f)

    def norm_sq(self) -> float:
        return float(stable_sum(self.grid.lebesgue_weights * np.abs(self.values) ** 2))

    def inner(self, other: "SampledFunction4") -> complex:
        return complex(stable_sum(self.grid.lebesgue_weights * self.values * other.values.conj()))

    def __sub__(self, other: "SampledFunction4") -> "SampledFunction4":
        return SampledFunction4(self.values - other.values, self.grid)

    def to_bytes(self) -> bytes:
        pts = self.grid.axis_nodes.size
        header = f"SampledFunction4 quat_quad_points={pts} a_magnitude={self.grid.gauss_rate / 2.0!r}\n"
        return header.encode() + self.values.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SampledFunction4":
        head, _, body = data.partition(b"\n")
        fields_ = head.decode().split()
        if not fields_ or fields_[0] != "SampledFunction4":
            raise ValueError("not a SampledFunction4 file")
        kv = dict(f.split("=", 1) for f in fields_[1:])
        grid = gauss_grid_4d(int(kv["quat_quad_points"]), float(kv["a_magnitude"]))
        return cls(np.frombuffer(body, dtype="<c16").astype(complex), grid)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "SampledFunction4":
        return cls.from_bytes(Path(path).read_bytes())


# ------------------------------------------------------------ Weyl transform


def weyl_a_batch(
    values: np.ndarray, grid: QuadratureGrid, basis: FockBasis, chunk: int = 4000
) -> np.ndarray:
    """``W_a(g) = int g(q) pi_a(q) dq`` for the columns of ``values`` (shape ``(nodes, F)``)."""
    values = np.asarray(values, dtype=complex).reshape(grid.size, -1)
    w = grid.lebesgue_weights
    parts = []
    for start in range(0, grid.size, chunk):
        sl = slice(start, min(start + chunk, grid.size))
        stack = pi_a_stack(grid.nodes[sl], basis).reshape(sl.stop - sl.start, -1)
        parts.append(((values[sl] * w[sl, None]).T @ stack))
    total = stable_sum(np.stack(parts))
    return total.reshape(-1, basis.dim, basis.dim)


def weyl_a(g: SampledFunction4, basis: FockBasis) -> OperatorMatrix:
    return OperatorMatrix(weyl_a_batch(g.values[:, None], g.grid, basis)[0], "fock")


def inversion_a(w: OperatorMatrix | np.ndarray, q: Sequence[float], basis: FockBasis) -> complex:
    """``(4|a|^2/pi^2) tr(pi_a(q)^* W)``."""
    wm = w.entries if isinstance(w, OperatorMatrix) else np.asarray(w)
    p = pi_a_stack(np.asarray(q, float)[None, :], basis)[0]
    return complex(basis.param.inversion_factor * np.sum(p.conj() * wm))


def inversion_a_grid(w: OperatorMatrix | np.ndarray, grid: QuadratureGrid, basis: FockBasis, chunk: int = 4000) -> np.ndarray:
    wm = w.entries if isinstance(w, OperatorMatrix) else np.asarray(w)
    out = np.empty(grid.size, dtype=complex)
    flat = wm.ravel()
    for start in range(0, grid.size, chunk):
        sl = slice(start, min(start + chunk, grid.size))
        stack = pi_a_stack(grid.nodes[sl], basis).reshape(sl.stop - sl.start, -1)
        out[sl] = stack.conj() @ flat
    return basis.param.inversion_factor * out


# ----------------------------------------------------------- Schur constant


class DegeneratePairing(ValueError):
    pass


def schur_constant(
    quadruples: Sequence[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]],
    basis: FockBasis,
    grid: QuadratureGrid,
    tol: float = 1e-8,
) -> tuple[float, float, np.ndarray]:
    """Estimate ``c_a`` from each quadruple ``(phi1, psi1, phi2, psi2)``.

    Returns ``(mean, max relative spread, per-quadruple estimates)``.
    """
    stack = pi_a_stack(grid.nodes, basis)
    w = grid.lebesgue_weights
    est = []
    for phi1, psi1, phi2, psi2 in quadruples:
        den = np.vdot(phi2, phi1) * np.conj(np.vdot(psi2, psi1))
        if abs(den) < tol:
            raise DegeneratePairing("pairing denominator below tolerance")
        f1 = np.einsum("b,nba,a->n", np.conj(psi1), stack, phi1)
        f2 = np.einsum("b,nba,a->n", np.conj(psi2), stack, phi2)
        est.append(stable_sum(w * f1 * f2.conj()) / den)
    est = np.array(est)
    mean = complex(np.mean(est))
    spread = float(np.max(np.abs(est - mean)) / abs(mean))
    return float(mean.real), spread, est


# -------------------------------------------------------------- convolution


def tilde(h: SampledFunction4) -> SampledFunction4:
    """``h~(q) = conj h(-q)``; the Gauss grid is symmetric so this is a reindexing."""
    n = h.grid.axis_nodes.size
    vals = h.values.reshape(n, n, n, n)[::-1, ::-1, ::-1, ::-1].conj().ravel()
    src = None
    if isinstance(h.source, GaussPoly):
        src = h.source.tilde()
    elif h.source is not None:
        f = h.source
        src = lambda q: np.conj(f(-np.atleast_2d(q)))  # noqa: E731
    return SampledFunction4(vals, h.grid, src)


def twisted_convolution_a(
    h: SampledFunction4,
    g: SampledFunction4,
    param: QuatParam,
    out_grid: QuadratureGrid,
    inner_points: int = 4,
    chunk: int = 256,
) -> SampledFunction4:
    """``(h~ x_a g)(qt) = int g(qt - q) h~(q) exp(-2i<qt a, q>) dq``.

    Both inputs must carry a ``source`` callable.  Put ``q = qt/2 + u`` and
    ``b = qt a``; then ``<qt a, qt/2> = 0`` and, completing the square,

        exp(-2s u.u - 2i b.u) = exp(-2s v.v) exp(-b.b / 2s),  v = u + i b / 2s.

    For entire sources (``source.analytic``) the contour is shifted to real
    ``v`` and a Gauss-Hermite rule for ``exp(-2s v.v)`` integrates the
    remaining factor, a polynomial for :class:`GaussPoly` inputs of rate
    ``s``.  Other sources use the same rule on the real contour with the
    oscillating phase left in the integrand.
    """
    ht = tilde(h)
    if ht.source is None or g.source is None:
        raise ValueError("twisted convolution needs callable sources")
    f, gs = ht.source, g.source
    s = param.s
    analytic = getattr(f, "analytic", False) and getattr(gs, "analytic", False)
    rule = gauss_grid_4d(inner_points, s)
    v, wv = rule.nodes, rule.weights
    out = np.empty(out_grid.size, dtype=complex)
    for start in range(0, out_grid.size, chunk):
        qt = out_grid.nodes[start : start + chunk]
        c = len(qt)
        b = qmul(qt, np.broadcast_to(param.vector, qt.shape))  # qt a
        if analytic:
            u = v[None, :, :] - 1j * (b / (2.0 * s))[:, None, :]
            damp = np.exp(-np.sum(b * b, axis=1) / (2.0 * s))
            phase = damp[:, None]
        else:
            u = np.broadcast_to(v[None, :, :], (c,) + v.shape)
            phase = np.exp(-2j * np.einsum("ck,cnk->cn", b, u))
        q = u + 0.5 * qt[:, None, :]
        diff = 0.5 * qt[:, None, :] - u
        uu = np.einsum("cnk,cnk->cn", u, u)
        vals = (gs(diff.reshape(-1, 4)) * f(q.reshape(-1, 4))).reshape(c, -1) * np.exp(2.0 * s * uu)
        out[start : start + c] = (vals * phase * wv[None, :]).sum(axis=1)
    return SampledFunction4(out, out_grid)


class SupportOverflow(ValueError):
    pass


def twisted_translate_a(g: SampledFunction4, qt: Sequence[float], param: QuatParam, tol: float = 1e-6) -> SampledFunction4:
    """``g_qt(q) = exp(2i<q a, qt>) g(q - qt)``.

    Evaluated exactly through ``g.source`` when present, otherwise by
    multilinear interpolation on the tensor grid.
    """
    qt = np.asarray(qt, dtype=float)
    nodes = g.grid.nodes
    phase = np.exp(2j * phase_pairing(nodes, np.broadcast_to(qt, nodes.shape), param))
    if g.source is not None:
        src = g.source
        shifted = lambda q: np.exp(  # noqa: E731
            2j * phase_pairing(np.atleast_2d(q), np.broadcast_to(qt, np.atleast_2d(q).shape), param)
        ) * src(np.atleast_2d(q) - qt)
        return SampledFunction4(shifted(nodes), g.grid, shifted)
    ax = g.grid.axis_nodes
    n = ax.size
    vals = g.values.reshape(n, n, n, n)
    back = nodes - qt
    inside = np.all((back >= ax[0]) & (back <= ax[-1]), axis=1)
    mass = np.abs(g.values) ** 2 * g.grid.lebesgue_weights
    # mass that would have to come from outside the interpolation box
    fwd = nodes + qt
    lost = ~np.all((fwd >= ax[0]) & (fwd <= ax[-1]), axis=1)
    if mass.sum() > 0 and mass[lost].sum() > tol * mass.sum():
        raise SupportOverflow("translated support leaves the grid")
    interp = RegularGridInterpolator((ax, ax, ax, ax), vals, bounds_error=False, fill_value=0.0)
    out = np.where(inside, interp(back), 0.0)
    return SampledFunction4(phase * out, g.grid)
