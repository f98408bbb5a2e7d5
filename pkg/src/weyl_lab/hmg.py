"""Heisenberg motion group with n = 1, K = U(1), at lambda = 1.

Conventions
-----------
* ``pi(z)`` is the Schrodinger representation,
  ``pi(z) f(xi) = exp(i(x xi + x y / 2)) f(xi + y)`` with ``z = x + iy``.
  In the Hermite basis it is the displacement operator ``D(i z / sqrt 2)``;
  entry ``[k, j]`` of :func:`schrodinger_matrix` is ``<pi(z) phi_j, phi_k>``.
* ``mu(theta)`` acts by ``phi_k -> exp(i k theta) phi_k``.
* The sector-``m`` representation is ``rho_m(z, theta) = exp(i m theta) pi(z) mu(theta)``.
* Haar measure on U(1) has total mass one, so a theta average is a plain mean
  over ``theta_samples`` equispaced angles.
* Sector spaces are spanned by the conjugated Fourier-Wigner functions
  ``conj V^m_{phi_j, phi_l}``; these are exactly the functions that ``W_m``
  pairs against, so ``W_m(g) = W_m(g_m)`` for the sector component ``g_m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, pi, sqrt
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .numerics import (
    OperatorMatrix,
    QuadratureGrid,
    TruncationConfig,
    circle_grid,
    eps_rank,
    planar_grid,
    stable_sum,
)

TWO_PI = 2.0 * pi

__all__ = [
    "HMGContext",
    "HMGPoint",
    "SampledFunction2",
    "hermite_eval",
    "hermite_table",
    "displacement_stack",
    "schrodinger_matrix",
    "metaplectic_diag",
    "rho_matrix",
    "weyl_transform",
    "weyl_transforms",
    "fourier_wigner",
    "sample_fourier_wigner",
    "synthesize",
    "synthesize_batch",
    "fourier_wigner_gram",
    "clear_cache",
    "inversion_reconstruct",
    "inversion_on_grid",
    "peter_weyl_project",
    "partial_fourier_t",
    "twisted_translate",
    "sector_function",
]


# ---------------------------------------------------------------- Hermite basis


def hermite_table(cutoff: int, x) -> np.ndarray:
    """L2-normalised Hermite functions ``phi_0 .. phi_{cutoff-1}`` at ``x``.

    Shape ``(cutoff,) + x.shape``; three-term recurrence.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((cutoff,) + x.shape)
    out[0] = pi**-0.25 * np.exp(-0.5 * x * x)
    if cutoff > 1:
        out[1] = sqrt(2.0) * x * out[0]
    for k in range(1, cutoff - 1):
        out[k + 1] = sqrt(2.0 / (k + 1)) * x * out[k] - sqrt(k / (k + 1)) * out[k - 1]
    return out


def hermite_eval(k: int, x, cutoff: int | None = None):
    """Value of the normalised Hermite function ``phi_k`` at ``x``."""
    if k < 0 or (cutoff is not None and k >= cutoff):
        raise IndexError(f"Hermite index {k} outside 0..{cutoff}")
    val = hermite_table(k + 1, x)[k]
    return float(val) if np.ndim(val) == 0 else val


# --------------------------------------------------- Schrodinger / metaplectic


def displacement_stack(z, cutoff: int) -> np.ndarray:
    """``<pi(z) phi_j, phi_k>`` for many ``z`` at once.

    Returns shape ``(cutoff, cutoff, n)`` indexed ``[k, j, node]``.  Each
    diagonal ``k - j = d`` is filled by the normalised Laguerre recurrence,
    which stays accurate where the naive column recurrence loses digits.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    al = 1j * z / sqrt(2.0)
    x = (al * al.conj()).real
    out = np.empty((cutoff, cutoff, z.size), dtype=complex)
    damp = np.exp(-0.5 * x)
    power = np.ones_like(al)
    for d in range(cutoff):
        t = power * damp * np.exp(-0.5 * lgamma(d + 1))
        t_prev = None
        r_prev = 0.0
        for n in range(cutoff - d):
            out[n + d, n] = t
            if d:
                out[n, n + d] = (-1) ** d * t.conj()
            if n == cutoff - d - 1:
                break
            r = sqrt((n + 1) / (n + 1 + d))
            if t_prev is None:
                t_new = (1 + d - x) * r * t
            else:
                t_new = ((2 * n + 1 + d - x) * r * t - (n + d) * r * r_prev * t_prev) / (n + 1)
            t_prev, t, r_prev = t, t_new, r
        power = power * al
    return out


def _schrodinger_quadrature(z: complex, cutoff: int, points: int = 4001) -> np.ndarray:
    x, y = z.real, z.imag
    half = 12.0 + sqrt(2.0 * cutoff) + abs(y)
    xi = np.linspace(-half, half, points)
    dxi = xi[1] - xi[0]
    phi = hermite_table(cutoff, xi)
    shifted = hermite_table(cutoff, xi + y)
    phase = np.exp(1j * (x * xi + 0.5 * x * y))
    # entry [k, j] = int phase * phi_j(xi + y) * phi_k(xi)
    return (phi * dxi) @ (phase * shifted).T


def schrodinger_matrix(z: complex, cutoff: int, method: str = "closed") -> OperatorMatrix:
    """Matrix ``[<pi(z) phi_j, phi_k>]_{k, j}`` of the Schrodinger representation.

    ``method="quadrature"`` integrates the defining formula on a fine line
    grid instead of using the Laguerre closed form.
    """
    if method == "closed":
        mat = displacement_stack(complex(z), cutoff)[:, :, 0]
    elif method == "quadrature":
        mat = _schrodinger_quadrature(complex(z), cutoff)
    else:
        raise ValueError(f"unknown method {method!r}")
    return OperatorMatrix(mat, "hermite")


def metaplectic_diag(theta: float, cutoff: int) -> OperatorMatrix:
    return OperatorMatrix(np.diag(np.exp(1j * theta * np.arange(cutoff))), "hermite")


@dataclass(frozen=True)
class HMGPoint:
    z: complex
    theta: float = 0.0
    t: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)


def rho_matrix(m: int, p: HMGPoint, cutoff: int) -> OperatorMatrix:
    """Truncation of ``rho_m(z, theta) = e^{i m theta} pi(z) mu(theta)`` (times ``e^{it}``)."""
    d = displacement_stack(p.z, cutoff)[:, :, 0]
    phase = np.exp(1j * (m * p.theta + np.arange(cutoff) * p.theta))
    mat = d * phase[None, :]
    if p.t is not None:
        mat = mat * np.exp(1j * p.t)
    return OperatorMatrix(mat, "hermite-sector")


# ----------------------------------------------------------- sampled functions


@dataclass(frozen=True)
class HMGContext:
    """Grid and truncation shared by all sampled-function operations."""

    cutoff: int
    trusted: int
    grid: QuadratureGrid
    thetas: np.ndarray
    radius: float
    points: int
    chunk: int = 5000
    cache: bool = True

    @classmethod
    def from_config(cls, cfg: TruncationConfig, chunk: int = 5000, cache: bool = True) -> "HMGContext":
        return cls(
            cfg.hermite_cutoff,
            cfg.trusted,
            planar_grid(cfg.quad_radius, cfg.quad_points),
            circle_grid(cfg.theta_samples),
            cfg.quad_radius,
            cfg.quad_points,
            chunk,
            cache,
        )

    @property
    def T(self) -> int:
        return self.thetas.size

    @property
    def z(self) -> np.ndarray:
        n = self.grid.nodes
        return n[:, 0] + 1j * n[:, 1]

    @property
    def spacing(self) -> float:
        return 2.0 * self.radius / self.points

    def chunks(self) -> Iterable[tuple[slice, np.ndarray]]:
        """Yield ``(node slice, displacement stack)`` over the planar grid.

        The full stack for the most recently used grid is kept in memory
        (``M * M * Q**2`` complex numbers) when ``cache`` is set.
        """
        full = _cached_stack(self) if self.cache else None
        z = self.z
        for start in range(0, z.size, self.chunk):
            sl = slice(start, min(start + self.chunk, z.size))
            yield sl, (full[:, :, sl] if full is not None else displacement_stack(z[sl], self.cutoff))

    def zeros(self) -> "SampledFunction2":
        return SampledFunction2(np.zeros((self.grid.size, self.T), dtype=complex), self.radius, self.points)

    def band_sectors(self) -> list[int]:
        """Sectors represented on the theta grid: ``|m| <= T/4``."""
        q = self.T // 4
        return list(range(-q, q + 1))


_STACK_CACHE: dict = {}


def _cached_stack(ctx: HMGContext) -> np.ndarray:
    key = (ctx.cutoff, ctx.radius, ctx.points)
    if key not in _STACK_CACHE:
        _STACK_CACHE.clear()
        z = ctx.z
        full = np.empty((ctx.cutoff, ctx.cutoff, z.size), dtype=complex)
        for start in range(0, z.size, ctx.chunk):
            sl = slice(start, min(start + ctx.chunk, z.size))
            full[:, :, sl] = displacement_stack(z[sl], ctx.cutoff)
        _STACK_CACHE[key] = full
    return _STACK_CACHE[key]


def clear_cache() -> None:
    """Drop the cached displacement stack."""
    _STACK_CACHE.clear()


@dataclass(frozen=True)
class SampledFunction2:
    """Function on (planar grid) x (theta grid); ``values[node, theta_index]``."""

    values: np.ndarray
    radius: float
    points: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))

    @property
    def theta_samples(self) -> int:
        return self.values.shape[1]

    def _w(self) -> float:
        h = 2.0 * self.radius / self.points
        return h * h / self.theta_samples

    def inner(self, other: "SampledFunction2") -> complex:
        """``int int f conj(g) dz dk`` with normalised Haar measure on U(1)."""
        prod = (self.values * other.values.conj()).sum(axis=1)
        return complex(stable_sum(prod) * self._w())

    def norm_sq(self) -> float:
        v = self.values
        return float(stable_sum((v.real**2 + v.imag**2).sum(axis=1)) * self._w())

    def __add__(self, other: "SampledFunction2") -> "SampledFunction2":
        return SampledFunction2(self.values + other.values, self.radius, self.points)

    def __sub__(self, other: "SampledFunction2") -> "SampledFunction2":
        return SampledFunction2(self.values - other.values, self.radius, self.points)

    def scaled(self, c: complex) -> "SampledFunction2":
        return SampledFunction2(c * self.values, self.radius, self.points)

    def fourier(self) -> np.ndarray:
        """Theta Fourier coefficients ``hat g_f = mean_theta g e^{-i f theta}``, index ``f mod T``."""
        return np.fft.fft(self.values, axis=1) / self.theta_samples

    # binary format: one text header line, then little-endian complex128 data
    def to_bytes(self) -> bytes:
        header = (
            f"SampledFunction2 quad_radius={self.radius!r} quad_points={self.points} "
            f"theta_samples={self.theta_samples}\n"
        )
        return header.encode() + self.values.astype("<c16").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "SampledFunction2":
        head, _, body = data.partition(b"\n")
        fields = head.decode().split()
        if not fields or fields[0] != "SampledFunction2":
            raise ValueError("not a SampledFunction2 file")
        kv = dict(f.split("=", 1) for f in fields[1:])
        radius, points, T = float(kv["quad_radius"]), int(kv["quad_points"]), int(kv["theta_samples"])
        vals = np.frombuffer(body, dtype="<c16").reshape(points * points, T)
        return cls(vals.astype(complex), radius, points)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> "SampledFunction2":
        return cls.from_bytes(Path(path).read_bytes())


def _from_fourier(ghat: np.ndarray, ctx: HMGContext) -> SampledFunction2:
    vals = np.fft.ifft(ghat, axis=1) * ghat.shape[1]
    return SampledFunction2(vals, ctx.radius, ctx.points)


# -------------------------------------------------------------- Weyl transform


def weyl_transforms(
    ctx: HMGContext, gs: Sequence[SampledFunction2], sectors: Sequence[int]
) -> list[dict[int, OperatorMatrix]]:
    """``W_m(g) = int int g(z, theta) rho_m(z, theta) dz dtheta / 2pi`` for a batch.

    The theta integral is taken from the FFT of the samples: column ``k`` of
    ``W_m`` sees the coefficient of ``e^{-i(m+k) theta}``.  Planar chunks are
    reduced with :func:`stable_sum`.
    """
    M, T = ctx.cutoff, ctx.T
    sectors = list(sectors)
    S, F = len(sectors), len(gs)
    ghats = [g.fourier() for g in gs]
    ms = np.array(sectors)
    # freq index [k, s] for coefficient e^{-i(m_s + k) theta}
    fidx = (-(ms[None, :] + np.arange(M)[:, None])) % T
    w = ctx.grid.weights
    partial = []
    for sl, dst in ctx.chunks():
        # gathered[k, node, s*F + f]
        gathered = np.stack([gh[sl][:, fidx] for gh in ghats], axis=-1)  # node, k, s, f
        gathered = gathered * w[sl][:, None, None, None]
        gathered = gathered.transpose(1, 0, 2, 3).reshape(M, -1, S * F)
        lhs = np.ascontiguousarray(dst.transpose(1, 0, 2))  # [k, l, node]
        partial.append(lhs @ gathered)  # [k, l, S*F]
    total = stable_sum(np.stack(partial))  # [k, l, S*F]
    total = total.reshape(M, M, S, F)
    out = []
    for f in range(F):
        out.append({m: OperatorMatrix(total[:, :, s, f].T, "hermite-sector") for s, m in enumerate(sectors)})
    return out


def weyl_transform(ctx: HMGContext, g: SampledFunction2, m: int) -> OperatorMatrix:
    return weyl_transforms(ctx, [g], [m])[0][m]


def synthesize_batch(
    ctx: HMGContext, batch: Sequence[Mapping[int, np.ndarray | OperatorMatrix]]
) -> list[SampledFunction2]:
    """``sum_m tr(X_m rho_m(z, theta)^*)`` on the grid for several families of matrices.

    Equals ``sum_m sum_{l,k} X_m[l,k] conj(rho_m[l,k])``; the sector-m part has
    theta frequency ``-(m + k)`` in column ``k``.
    """
    M, T = ctx.cutoff, ctx.T
    F = len(batch)
    sectors = sorted({m for mats in batch for m in mats})
    if not sectors:
        return [ctx.zeros() for _ in range(F)]
    S = len(sectors)
    X = np.zeros((M, M, S, F), dtype=complex)  # [l, k, s, f]
    for f, mats in enumerate(batch):
        for m, x in mats.items():
            arr = np.asarray(x.entries if isinstance(x, OperatorMatrix) else x, dtype=complex)
            X[: arr.shape[0], : arr.shape[1], sectors.index(m), f] = arr
    rhs = np.ascontiguousarray(X.transpose(1, 0, 2, 3).reshape(M, M, S * F))  # [k, l, s*f]
    ms = np.array(sectors)
    scatter = np.zeros((M, S, T))
    fidx = (-(ms[None, :] + np.arange(M)[:, None])) % T
    for k in range(M):
        scatter[k, np.arange(S), fidx[k]] = 1.0
    scatter = scatter.reshape(M * S, T)
    ghat = np.zeros((F, ctx.grid.size, T), dtype=complex)
    for sl, dst in ctx.chunks():
        n = sl.stop - sl.start
        lhs = np.ascontiguousarray(dst.conj().transpose(1, 2, 0))  # [k, node, l]
        h = (lhs @ rhs).reshape(M, n, S, F)
        h = h.transpose(3, 1, 0, 2).reshape(F, n, M * S)
        ghat[:, sl] = h @ scatter
    return [_from_fourier(ghat[f], ctx) for f in range(F)]


def synthesize(ctx: HMGContext, mats: Mapping[int, np.ndarray | OperatorMatrix]) -> SampledFunction2:
    """Single-function form of :func:`synthesize_batch`."""
    return synthesize_batch(ctx, [mats])[0]


def inversion_on_grid(ctx: HMGContext, ws: Mapping[int, OperatorMatrix]) -> SampledFunction2:
    """``(2 pi)^{-1} sum_m tr(W_m rho_m^*)`` at every grid point."""
    return synthesize(ctx, ws).scaled(1.0 / TWO_PI)


def inversion_reconstruct(ws: Mapping[int, OperatorMatrix], p: HMGPoint, cutoff: int | None = None) -> complex:
    """Inversion formula at a single point."""
    total = 0.0 + 0.0j
    for m, w in ws.items():
        n = cutoff or w.rows
        r = rho_matrix(m, p, n).entries
        total += np.trace(w.entries[:n, :n] @ r.conj().T)
    return complex(total / TWO_PI)


def sector_function(ctx: HMGContext, coeffs: Mapping[int, np.ndarray]) -> SampledFunction2:
    """``sum_m sum_{l,j} C_m[l, j] conj V^m_{phi_j, phi_l}``; its ``W_m`` is ``2 pi C_m``."""
    M = ctx.cutoff
    mats = {}
    for m, c in coeffs.items():
        c = np.asarray(c, dtype=complex)
        pad = np.zeros((M, M), dtype=complex)
        pad[: c.shape[0], : c.shape[1]] = c
        mats[m] = pad
    return synthesize(ctx, mats)


# ---------------------------------------------------------- Fourier-Wigner


def fourier_wigner(zeta: np.ndarray, eta: np.ndarray, p: HMGPoint, m: int) -> complex:
    """``V_zeta^eta(p) = <rho_m(p) zeta, eta>``."""
    zeta = np.asarray(zeta, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    r = rho_matrix(m, p, zeta.size).entries
    return complex(np.vdot(eta, r @ zeta))


def sample_fourier_wigner(
    ctx: HMGContext, pairs: Sequence[tuple[np.ndarray, np.ndarray]], m: int
) -> list[SampledFunction2]:
    """Sample ``V^m_{zeta, eta}`` on the grid for several ``(zeta, eta)`` pairs."""
    M, T = ctx.cutoff, ctx.T
    Z = np.stack([np.pad(np.asarray(z, complex), (0, M - len(z))) for z, _ in pairs], axis=1)  # [k, P]
    E = np.stack([np.pad(np.asarray(e, complex), (0, M - len(e))) for _, e in pairs], axis=1)  # [l, P]
    P = Z.shape[1]
    ghats = np.zeros((P, ctx.grid.size, T), dtype=complex)
    fidx = (m + np.arange(M)) % T
    for sl, dst in ctx.chunks():
        # (eta^H D)_k = sum_l conj(eta_l) D[l, k]
        ed = np.einsum("lp,lkn->pnk", E.conj(), dst)  # [P, node, k]
        y = ed * Z.T[:, None, :]
        for k in range(M):
            ghats[:, sl, fidx[k]] += y[:, :, k]
    return [_from_fourier(ghats[i], ctx) for i in range(P)]


def fourier_wigner_gram(
    ctx: HMGContext, pairs: Sequence[tuple[np.ndarray, np.ndarray]], m: int
) -> np.ndarray:
    """``[int int V_i conj(V_j) dz dtheta / 2pi]`` for ``V_i = V^m_{zeta_i, eta_i}``.

    The theta average is the T-point rule evaluated through the discrete
    Parseval identity: the samples of ``V_i`` are trigonometric polynomials
    with frequencies ``m .. m + M - 1``, so the T-point mean of
    ``V_i conj(V_j)`` equals ``sum_k`` of the products of their Fourier
    coefficients whenever ``M <= T``.
    """
    M = ctx.cutoff
    if M > ctx.T:
        raise ValueError("theta_samples must be at least the Hermite cutoff")
    Z = np.stack([np.pad(np.asarray(z, complex), (0, M - len(z))) for z, _ in pairs], axis=1)
    E = np.stack([np.pad(np.asarray(e, complex), (0, M - len(e))) for _, e in pairs], axis=1)
    w = ctx.grid.weights
    parts = []
    for sl, dst in ctx.chunks():
        ed = np.einsum("lp,lkn->nkp", E.conj(), dst) * Z[None, :, :]  # coefficient k of V_p
        y = ed.reshape(-1, len(pairs))
        wk = np.repeat(w[sl], M)
        parts.append((y * wk[:, None]).T @ y.conj())
    return stable_sum(np.stack(parts))


# ----------------------------------------------------------- Peter-Weyl


def peter_weyl_project(ctx: HMGContext, g: SampledFunction2, m: int, modes: int | None = None) -> SampledFunction2:
    """Orthogonal projection onto ``span{conj V^m_{phi_j, phi_l} : j, l < modes}``.

    The coefficients are the quadrature inner products
    ``<g, conj V^m_{jl}> = W_m(g)[l, j]``.
    """
    n = modes or ctx.trusted
    w = weyl_transform(ctx, g, m).entries
    trunc = np.zeros_like(w)
    trunc[:n, :n] = w[:n, :n]
    return synthesize(ctx, {m: trunc}).scaled(1.0 / TWO_PI)


# ---------------------------------------------------- t-transform, translates


def partial_fourier_t(
    ctx: HMGContext, f_samples: np.ndarray, t_nodes: np.ndarray, lam: float
) -> SampledFunction2:
    """``f^lambda(z, k) = int f(z, t, k) e^{i lambda t} dt`` by the trapezoid rule.

    ``f_samples`` has shape ``(nodes, theta_samples, len(t_nodes))``.
    """
    t = np.asarray(t_nodes, dtype=float)
    wt = np.empty_like(t)
    dt = np.diff(t)
    wt[0], wt[-1] = 0.5 * dt[0], 0.5 * dt[-1]
    wt[1:-1] = 0.5 * (dt[:-1] + dt[1:])
    vals = np.asarray(f_samples, dtype=complex) @ (wt * np.exp(1j * lam * t))
    return SampledFunction2(vals, ctx.radius, ctx.points)


class SupportOverflow(ValueError):
    """A translate would push mass out of the quadrature box."""


def twisted_translate(
    ctx: HMGContext, g: SampledFunction2, w: complex, tol: float = 1e-5
) -> SampledFunction2:
    """``g_w(z, k) = e^{(i/2) Im(z conj w)} g(z - w, k)`` by bilinear interpolation.

    Exact when ``w`` is a multiple of the node spacing.  Raises
    :class:`SupportOverflow` when more than ``tol`` of the squared L2 mass
    would cross the box edge.
    """
    w = complex(w)
    Q, h = ctx.points, ctx.spacing
    x0 = -ctx.radius + 0.5 * h
    vals = g.values.reshape(Q, Q, -1)
    # mass that the shift would push across the box edge
    mass = (np.abs(vals) ** 2).sum(axis=2)
    total = mass.sum()
    si, sj = int(np.ceil(abs(w.real) / h)), int(np.ceil(abs(w.imag) / h))
    keep = np.zeros((Q, Q), dtype=bool)
    xs = slice(0, Q - si) if w.real >= 0 else slice(si, Q)
    ys = slice(0, Q - sj) if w.imag >= 0 else slice(sj, Q)
    keep[xs, ys] = True
    if total > 0 and mass[~keep].sum() > tol * total:
        raise SupportOverflow("translated support leaves the quadrature box")
    z = ctx.z.reshape(Q, Q)
    fx = (z.real - w.real - x0) / h
    fy = (z.imag - w.imag - x0) / h
    # snap indices that are integers up to rounding
    fx = np.where(np.abs(fx - np.round(fx)) < 1e-9, np.round(fx), fx)
    fy = np.where(np.abs(fy - np.round(fy)) < 1e-9, np.round(fy), fy)
    i0 = np.floor(fx).astype(int)
    j0 = np.floor(fy).astype(int)
    tx = (fx - i0)[..., None]
    ty = (fy - j0)[..., None]
    padded = np.zeros((Q + 2, Q + 2, vals.shape[2]), dtype=complex)
    padded[1:-1, 1:-1] = vals

    def at(i, j):
        ok = (i >= -1) & (i <= Q) & (j >= -1) & (j <= Q)
        return np.where(ok[..., None], padded[np.clip(i + 1, 0, Q + 1), np.clip(j + 1, 0, Q + 1)], 0.0)

    out = (
        (1 - tx) * (1 - ty) * at(i0, j0)
        + tx * (1 - ty) * at(i0 + 1, j0)
        + (1 - tx) * ty * at(i0, j0 + 1)
        + tx * ty * at(i0 + 1, j0 + 1)
    )
    phase = np.exp(0.5j * (z * np.conj(w)).imag)[..., None]
    return SampledFunction2((phase * out).reshape(Q * Q, -1), ctx.radius, ctx.points)


def weyl_rank(w: OperatorMatrix, rel: float = 1e-6) -> int:
    return eps_rank(w, rel)
