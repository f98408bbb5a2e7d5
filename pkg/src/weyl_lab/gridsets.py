"""Finite unions of axis-aligned cubes and the growth-translate search.

Measures are computed in exact rational arithmetic: every float coordinate is
converted to the :class:`fractions.Fraction` it represents, so strict
inequalities between measures are decided without rounding.
"""

from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "GridSet",
    "BoxUnion",
    "Translate",
    "measure",
    "union_measure",
    "find_growth_translate",
    "enlargement_sequence",
    "GrowthStep",
]

Box = tuple[tuple[Fraction, ...], tuple[Fraction, ...]]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(float(x))


@dataclass(frozen=True)
class Translate:
    offset: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "offset", tuple(float(v) for v in self.offset))

    @property
    def dimension(self) -> int:
        return len(self.offset)

    def as_complex(self) -> complex:
        if self.dimension != 2:
            raise ValueError("only planar translates are complex numbers")
        return complex(self.offset[0], self.offset[1])


@dataclass(frozen=True)
class GridSet:
    """Union of half-open lattice cubes ``[i*h, (i+1)*h)`` per axis."""

    dimension: int
    cell_size: float
    cells: frozenset

    def __init__(self, dimension: int, cell_size: float, cells: Iterable[Sequence[int]] = ()):
        if dimension not in (2, 4):
            raise ValueError("dimension must be 2 or 4")
        if not cell_size > 0:
            raise ValueError("cell_size must be positive")
        normalized = set()
        for c in cells:
            t = tuple(int(v) for v in c)
            if len(t) != dimension:
                raise ValueError(f"cell {t} does not have {dimension} indices")
            normalized.add(t)
        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "cell_size", float(cell_size))
        object.__setattr__(self, "cells", frozenset(normalized))

    @classmethod
    def box(cls, dimension: int, cell_size: float, lo: Sequence[int], hi: Sequence[int]) -> "GridSet":
        """Cells with ``lo[k] <= index[k] < hi[k]``."""
        ranges = [range(a, b) for a, b in zip(lo, hi)]
        return cls(dimension, cell_size, itertools.product(*ranges))

    def __len__(self) -> int:
        return len(self.cells)

    def sorted_cells(self) -> list[tuple[int, ...]]:
        return sorted(self.cells)

    def _check(self, other: "GridSet") -> None:
        if self.dimension != other.dimension or self.cell_size != other.cell_size:
            raise ValueError("grid sets live on different lattices")

    def union(self, other: "GridSet") -> "GridSet":
        self._check(other)
        return GridSet(self.dimension, self.cell_size, self.cells | other.cells)

    def intersection(self, other: "GridSet") -> "GridSet":
        self._check(other)
        return GridSet(self.dimension, self.cell_size, self.cells & other.cells)

    def issubset(self, other: "GridSet") -> bool:
        self._check(other)
        return self.cells <= other.cells

    def lows(self) -> np.ndarray:
        """Lower corners of the cells, shape ``(ncells, dim)``."""
        if not self.cells:
            return np.zeros((0, self.dimension))
        return np.array(self.sorted_cells(), dtype=float) * self.cell_size

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Indicator of the set at each row of ``points``."""
        pts = np.atleast_2d(points)
        idx = np.floor(pts / self.cell_size).astype(np.int64)
        return np.fromiter((tuple(r) in self.cells for r in idx), dtype=bool, count=len(idx))

    def boxes(self) -> list[Box]:
        h = _frac(self.cell_size)
        return [
            (tuple(h * i for i in c), tuple(h * (i + 1) for i in c))
            for c in self.sorted_cells()
        ]

    def as_union(self) -> "BoxUnion":
        return BoxUnion(self.dimension, tuple(self.boxes()))

    def diameter(self) -> float:
        if not self.cells:
            return 0.0
        lo = self.lows()
        span = lo.max(axis=0) - lo.min(axis=0) + self.cell_size
        return float(np.linalg.norm(span))

    # text format: "dim h" then one cell per line
    def to_text(self) -> str:
        lines = [f"{self.dimension} {self.cell_size!r}"]
        lines += [" ".join(str(v) for v in c) for c in self.sorted_cells()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GridSet":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2:
            raise ValueError("first line must be 'dim h'")
        dim, h = int(rows[0][0]), float(rows[0][1])
        return cls(dim, h, (tuple(int(v) for v in r) for r in rows[1:]))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path: str | Path) -> "GridSet":
        return cls.from_text(Path(path).read_text())


@dataclass(frozen=True)
class BoxUnion:
    """Finite union of (possibly overlapping, unaligned) boxes."""

    dimension: int
    boxes: tuple

    def translated(self, w: Translate) -> "BoxUnion":
        off = tuple(_frac(v) for v in w.offset)
        return BoxUnion(
            self.dimension,
            tuple(
                (tuple(a + o for a, o in zip(lo, off)), tuple(b + o for b, o in zip(hi, off)))
                for lo, hi in self.boxes
            ),
        )

    def __or__(self, other: "BoxUnion") -> "BoxUnion":
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        return BoxUnion(self.dimension, self.boxes + other.boxes)

    def exact_measure(self) -> Fraction:
        return _boxes_measure(self.boxes, self.dimension)

    def measure(self) -> float:
        return float(self.exact_measure())

    def contains(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(points)
        out = np.zeros(len(pts), dtype=bool)
        for lo, hi in self.boxes:
            lo_f = np.array([float(v) for v in lo])
            hi_f = np.array([float(v) for v in hi])
            out |= np.all((pts >= lo_f) & (pts < hi_f), axis=1)
        return out

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([[float(v) for v in b[0]] for b in self.boxes])
        hi = np.array([[float(v) for v in b[1]] for b in self.boxes])
        return lo.min(axis=0), hi.max(axis=0)


def _boxes_measure(boxes: Sequence[Box], dim: int) -> Fraction:
    """Exact measure of a union of boxes by coordinate compression.

    Each axis is cut at every box face; a compressed cell is covered when some
    box contains it, and covered cells are summed in rational arithmetic.
    """
    if not boxes:
        return Fraction(0)
    cuts = [sorted({b[0][k] for b in boxes} | {b[1][k] for b in boxes}) for k in range(dim)]
    shape = tuple(len(c) - 1 for c in cuts)
    covered = np.zeros(shape, dtype=bool)
    for lo, hi in boxes:
        sl = tuple(
            slice(bisect.bisect_left(cuts[k], lo[k]), bisect.bisect_left(cuts[k], hi[k]))
            for k in range(dim)
        )
        covered[sl] = True
    widths = [[c[i + 1] - c[i] for i in range(len(c) - 1)] for c in cuts]
    # sum over covered cells, axis by axis, to keep the rational work small
    total = Fraction(0)
    idx = np.argwhere(covered)
    if dim == 2:
        w0, w1 = widths
        for i, j in idx:
            total += w0[i] * w1[j]
        return total
    for cell in idx:
        v = Fraction(1)
        for k, i in enumerate(cell):
            v *= widths[k][i]
        total += v
    return total


def _as_union(s) -> BoxUnion:
    return s.as_union() if isinstance(s, GridSet) else s


def measure(s) -> float:
    """Lebesgue measure (cell count times ``h**dim`` for a grid set)."""
    if isinstance(s, GridSet):
        return float(len(s.cells) * _frac(s.cell_size) ** s.dimension)
    return s.measure()


def exact_measure(s) -> Fraction:
    if isinstance(s, GridSet):
        return len(s.cells) * _frac(s.cell_size) ** s.dimension
    return s.exact_measure()


def exact_union_measure(b, b0, w: Translate) -> Fraction:
    ub, ub0 = _as_union(b), _as_union(b0)
    if ub.dimension != ub0.dimension or w.dimension != ub.dimension:
        raise ValueError("dimension mismatch")
    return (ub | ub0.translated(w)).exact_measure()


def union_measure(b, b0, w: Translate) -> float:
    """Measure of ``B ∪ (w + B0)``."""
    return float(exact_union_measure(b, b0, w))


def find_growth_translate(b, b0, eps: float, max_iter: int = 200) -> Translate:
    """A translate ``w`` with ``m(B) < m(B ∪ (w + B0)) < m(B) + eps``.

    Bisection along the first axis between ``w = 0`` (nothing added, since
    ``B0 ⊆ B``) and an offset far enough that the translate is disjoint.
    The returned translate is re-checked in exact arithmetic.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    ub, ub0 = _as_union(b), _as_union(b0)
    if ub.dimension != ub0.dimension:
        raise ValueError("dimension mismatch")
    if isinstance(b, GridSet) and isinstance(b0, GridSet) and not b0.issubset(b):
        raise ValueError("b0 must be a subset of b")
    if exact_measure(b0) <= 0:
        raise ValueError("b0 must have positive measure")
    dim = ub.dimension
    base = exact_measure(b) if isinstance(b, GridSet) else ub.exact_measure()
    upper = base + _frac(eps)

    lo_b, hi_b = ub.bounds()
    lo_0, hi_0 = ub0.bounds()
    far = float(hi_b[0] - lo_0[0]) + 1.0

    def value(t: float) -> Fraction:
        w = Translate((t,) + (0.0,) * (dim - 1))
        return exact_union_measure(ub, ub0, w)

    def ok(v: Fraction) -> bool:
        return base < v < upper

    lo, hi = 0.0, far
    v_hi = value(hi)
    if ok(v_hi):
        return Translate((hi,) + (0.0,) * (dim - 1))
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        v = value(mid)
        if ok(v):
            return Translate((mid,) + (0.0,) * (dim - 1))
        if v <= base:
            lo = mid
        else:
            hi = mid
    raise RuntimeError("bisection exceeded its iteration cap")


@dataclass(frozen=True)
class GrowthStep:
    translate: Translate
    union: BoxUnion
    budget: float
    added: float


def enlargement_sequence(b, b0, eps_total: float, steps: int) -> list[GrowthStep]:
    """Iterated growth translates with budgets ``eps_total / 2**l``, ``l = 1..steps``.

    Returns one :class:`GrowthStep` per step carrying the translate and the
    running union.  The total added measure is below ``eps_total``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    current = _as_union(b)
    prev = exact_measure(b)
    out = []
    for l in range(1, steps + 1):
        budget = eps_total / 2**l
        w = find_growth_translate(current, b0, budget)
        current = current | _as_union(b0).translated(w)
        m = current.exact_measure()
        out.append(GrowthStep(w, current, budget, float(m - prev)))
        prev = m
    return out
