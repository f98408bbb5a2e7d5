"""Shared dense linear algebra, quadrature grids and deterministic reduction."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TruncationConfig",
    "OperatorMatrix",
    "QuadratureGrid",
    "ConvergenceError",
    "hs_norm",
    "op_norm",
    "min_eigen_sym",
    "eps_rank",
    "stable_sum",
    "planar_grid",
    "circle_grid",
    "gauss_grid_4d",
    "gauss_legendre_cells",
    "load_config",
    "dump_config",
]


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap."""


_INT_FIELDS = (
    "hermite_cutoff",
    "buffer",
    "theta_samples",
    "quad_points",
    "fock_degree",
    "quat_quad_points",
    "proj_quad_points",
    "seed",
)
_FLOAT_FIELDS = ("quad_radius", "a_magnitude", "tol", "proj_quad_radius")


@dataclass(frozen=True)
class TruncationConfig:
    """All discretization parameters of a run.

    ``hermite_cutoff`` (M) Hermite modes are carried; modes ``0 .. M-1-buffer``
    are the trusted block on which identities are asserted.  The planar box is
    ``[-quad_radius, quad_radius]^2`` sampled by ``quad_points`` midpoints per
    axis.  ``proj_quad_radius``/``proj_quad_points`` describe the wider planar
    grid used by the projection lab's kernel path.
    """

    hermite_cutoff: int = 32
    buffer: int = 27
    theta_samples: int = 64
    quad_radius: float = 8.0
    quad_points: int = 200
    fock_degree: int = 6
    quat_quad_points: int = 12
    a_magnitude: float = 1.0
    tol: float = 1e-10
    seed: int = 20240607
    proj_quad_radius: float = 12.0
    proj_quad_points: int = 240

    def __post_init__(self) -> None:
        problems = []
        if self.hermite_cutoff < 4:
            problems.append("hermite_cutoff must be >= 4")
        if not 2 <= self.buffer < self.hermite_cutoff:
            problems.append("buffer must satisfy 2 <= buffer < hermite_cutoff")
        if self.theta_samples < 8:
            problems.append("theta_samples must be >= 8")
        if self.quad_points < 16 or self.proj_quad_points < 16:
            problems.append("quad_points must be >= 16")
        if self.fock_degree < 2:
            problems.append("fock_degree must be >= 2")
        if self.quat_quad_points < 1:
            problems.append("quat_quad_points must be positive")
        for name in ("quad_radius", "proj_quad_radius", "a_magnitude", "tol"):
            if not getattr(self, name) > 0:
                problems.append(f"{name} must be > 0")
        if not 0 <= self.seed < 2**64:
            problems.append("seed must be a 64-bit unsigned integer")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def trusted(self) -> int:
        """Number of trusted Hermite modes."""
        return self.hermite_cutoff - self.buffer

    def replace(self, **changes) -> "TruncationConfig":
        return dataclasses.replace(self, **changes)

    def to_text(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            lines.append(f"{f.name} = {value!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mapping(cls, data: dict) -> "TruncationConfig":
        kwargs = {}
        for key, raw in data.items():
            if key in _INT_FIELDS:
                kwargs[key] = int(raw)
            elif key in _FLOAT_FIELDS:
                kwargs[key] = float(raw)
            else:
                raise KeyError(f"unknown config key {key!r}")
        return cls(**kwargs)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def parse_key_values(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def load_config(path: str | Path) -> tuple[TruncationConfig, dict[str, str]]:
    """Read a ``key = value`` config file.

    Returns the truncation config and the remaining (non-config) keys, which
    name set files and similar extras.
    """
    data = parse_key_values(Path(path).read_text())
    names = {f.name for f in dataclasses.fields(TruncationConfig)}
    cfg = TruncationConfig.from_mapping({k: v for k, v in data.items() if k in names})
    extras = {k: v for k, v in data.items() if k not in names}
    return cfg, extras


def dump_config(cfg: TruncationConfig, path: str | Path) -> None:
    Path(path).write_text(cfg.to_text())


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense complex matrix of a truncated operator on a named orthonormal basis."""

    entries: np.ndarray
    basis_tag: str = "hermite"

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or 0 in arr.shape:
            raise ValueError("OperatorMatrix needs a non-empty 2-d array")
        object.__setattr__(self, "entries", arr)

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.entries.conj().T, self.basis_tag)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.entries @ other.entries, self.basis_tag)

    def block(self, n: int) -> np.ndarray:
        """Leading ``n x n`` block."""
        return self.entries[:n, :n]

    def row_major(self) -> np.ndarray:
        return self.entries.ravel()


def _as_array(m) -> np.ndarray:
    return m.entries if isinstance(m, OperatorMatrix) else np.asarray(m, dtype=complex)


def hs_norm(m) -> float:
    """Hilbert-Schmidt (Frobenius) norm."""
    a = _as_array(m)
    return float(np.sqrt(stable_sum((a.real**2 + a.imag**2).ravel()).real))


def _start_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def op_norm(m, tol: float = 1e-12, seed: int = 0, max_iter: int = 20000) -> float:
    """Largest singular value by power iteration on ``m* m``.

    The start vector is a fixed function of ``seed``.  Raises
    :class:`ConvergenceError` when the Rayleigh quotient has not settled to
    relative ``tol`` within ``max_iter`` steps.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = _as_array(m)
    if not np.any(a):
        return 0.0
    gram = a.conj().T @ a
    v = _start_vector(gram.shape[0], seed)
    lam = 0.0
    for _ in range(max_iter):
        w = gram @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            # start vector hit the kernel; perturb deterministically
            v = np.roll(v, 1) + _start_vector(v.size, seed + 1)
            v /= np.linalg.norm(v)
            continue
        lam_new = float(np.vdot(v, w).real)
        v = w / nrm
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return float(np.sqrt(max(lam_new, 0.0)))
        lam = lam_new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


def min_eigen_sym(m, tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    a = _as_array(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.conj().T).max() > tol * scale:
        raise ValueError("matrix is not Hermitian")
    return float(np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0])


def eps_rank(m, rel: float = 1e-6) -> int:
    """Number of singular values above ``rel`` times the largest."""
    a = _as_array(m)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel * s[0]))


def stable_sum(values: Sequence | np.ndarray | Iterable) -> complex | np.ndarray:
    """Pairwise (balanced tree) sum along the first axis.

    The pairing order depends only on the length of the input, so identical
    inputs in identical order give identical bits.
    """
    a = np.asarray(values if not isinstance(values, (map, filter)) else list(values))
    if a.size == 0 and a.ndim <= 1:
        return 0.0 + 0.0j if a.dtype.kind == "c" else 0.0
    if a.ndim == 0:
        return a[()]
    while a.shape[0] > 1:
        if a.shape[0] % 2:
            a = np.concatenate([a, np.zeros_like(a[:1])])
        a = a[0::2] + a[1::2]
    out = a[0]
    return out[()] if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class QuadratureGrid:
    """Tensor quadrature rule.

    ``nodes`` has shape ``(n, dim)``; ``weights`` shape ``(n,)``.  For the
    ``gauss-hermite`` scheme the weights integrate against ``exp(-2|a||q|^2)``
    and ``lebesgue_weights`` gives the rule for plain ``dq``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    scheme: str
    axis_nodes: np.ndarray = field(repr=False)
    gauss_rate: float = 0.0

    @property
    def dimension(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def lebesgue_weights(self) -> np.ndarray:
        if self.scheme != "gauss-hermite":
            return self.weights
        r2 = np.sum(self.nodes**2, axis=1)
        return self.weights * np.exp(self.gauss_rate * r2)

    def integrate(self, values: np.ndarray, lebesgue: bool = True) -> complex:
        w = self.lebesgue_weights if lebesgue else self.weights
        return stable_sum(w * np.asarray(values))


def planar_grid(radius: float, points: int) -> QuadratureGrid:
    """Uniform midpoint rule on ``[-radius, radius]^2``.

    Nodes sit at cell centres, so the rule equals the trapezoid rule for
    integrands that vanish at the box edge and integrates indicators of cells
    aligned with the node spacing exactly.
    """
    h = 2.0 * radius / points
    x = -radius + (np.arange(points) + 0.5) * h
    X, Y = np.meshgrid(x, x, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    weights = np.full(nodes.shape[0], h * h)
    return QuadratureGrid(nodes, weights, "uniform-trapezoid", x)


def circle_grid(samples: int) -> np.ndarray:
    """Uniform angles on U(1); each carries Haar weight ``1/samples``."""
    return 2.0 * np.pi * np.arange(samples) / samples


def gauss_grid_4d(points: int, a_magnitude: float) -> QuadratureGrid:
    """Gauss-Hermite tensor rule for the weight ``exp(-2|a||q|^2)`` on R^4."""
    rate = 2.0 * a_magnitude
    t, w = np.polynomial.hermite.hermgauss(points)
    x = t / np.sqrt(rate)
    wx = w / np.sqrt(rate)
    grids = np.meshgrid(x, x, x, x, indexing="ij")
    nodes = np.column_stack([g.ravel() for g in grids])
    wg = np.meshgrid(wx, wx, wx, wx, indexing="ij")
    weights = wg[0].ravel() * wg[1].ravel() * wg[2].ravel() * wg[3].ravel()
    return QuadratureGrid(nodes, weights, "gauss-hermite", x, gauss_rate=rate)


def gauss_legendre_cells(lows: np.ndarray, size: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor Gauss-Legendre nodes/weights on cubes ``[low, low+size)``.

    ``lows`` has shape ``(ncells, dim)``.  Returns ``(nodes, weights)`` with
    ``ncells * order**dim`` rows.
    """
    lows = np.atleast_2d(np.asarray(lows, dtype=float))
    dim = lows.shape[1]
    t, w = np.polynomial.legendre.leggauss(order)
    t = 0.5 * size * (t + 1.0)
    w = 0.5 * size * w
    mesh = np.meshgrid(*([t] * dim), indexing="ij")
    local = np.column_stack([m.ravel() for m in mesh])
    wmesh = np.meshgrid(*([w] * dim), indexing="ij")
    lw = np.prod(np.column_stack([m.ravel() for m in wmesh]), axis=1)
    nodes = (lows[:, None, :] + local[None, :, :]).reshape(-1, dim)
    weights = np.tile(lw, lows.shape[0])
    return nodes, weights
