import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from weyl_lab.gridsets import (
    BoxUnion,
    GridSet,
    Translate,
    enlargement_sequence,
    exact_measure,
    exact_union_measure,
    find_growth_translate,
    measure,
    union_measure,
)


def inclusion_exclusion(boxes):
    """Oracle: measure of a union of boxes by inclusion-exclusion."""
    total = Fraction(0)
    for r in range(1, len(boxes) + 1):
        for combo in itertools.combinations(boxes, r):
            vol = Fraction(1)
            for k in range(len(combo[0][0])):
                lo = max(Fraction(b[0][k]) for b in combo)
                hi = min(Fraction(b[1][k]) for b in combo)
                vol *= max(hi - lo, 0)
            total += (-1) ** (r + 1) * vol
    return total


dyadic = st.integers(-16, 16).map(lambda n: Fraction(n, 8))


@st.composite
def boxes(draw, dim):
    lo = [draw(dyadic) for _ in range(dim)]
    ext = [draw(st.integers(1, 10)) for _ in range(dim)]
    return tuple(lo), tuple(a + Fraction(e, 8) for a, e in zip(lo, ext))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4).flatmap(lambda d: st.lists(boxes(d), min_size=1, max_size=5)))
def test_union_measure_matches_inclusion_exclusion(bx):
    u = BoxUnion(len(bx[0][0]), tuple(bx))
    assert u.exact_measure() == inclusion_exclusion(bx)


def test_gridset_algebra_and_measure(tmp_path):
    a = GridSet.box(2, 0.5, (0, 0), (2, 2))
    b = GridSet(2, 0.5, [(1, 1), (5, 5)])
    assert len(a.union(b)) == 5 and len(a.intersection(b)) == 1
    assert exact_measure(a) == 1 and measure(b) == pytest.approx(0.5)
    assert GridSet(2, 0.5, [(0, 0)]).issubset(a)
    pts = np.array([[0.1, 0.9], [1.1, 0.1], [-0.01, 0.2]])
    assert a.contains(pts).tolist() == [True, False, False]
    a.save(tmp_path / "a.txt")
    assert GridSet.load(tmp_path / "a.txt").cells == a.cells
    with pytest.raises(ValueError):
        a.union(GridSet(2, 0.25, [(0, 0)]))


def test_translate_union_exact():
    b = GridSet.box(2, 1.0, (0, 0), (2, 1))
    b0 = GridSet(2, 1.0, [(0, 0)])
    assert exact_union_measure(b, b0, Translate((0.5, 0.0))) == 2
    assert exact_union_measure(b, b0, Translate((1.75, 0.0))) == Fraction(11, 4)
    assert union_measure(b, b0, Translate((0.0, 0.75))) == pytest.approx(2.75)


@pytest.mark.parametrize("eps", [1e-6, 0.01, 0.3, 5.0])
@pytest.mark.parametrize("dim", [2, 4])
def test_growth_translate_strict(dim, eps):
    b = GridSet.box(dim, 0.25, (0,) * dim, (3,) + (2,) * (dim - 1))
    b0 = GridSet(dim, 0.25, [(1,) + (0,) * (dim - 1)])
    w = find_growth_translate(b, b0, eps)
    mb = exact_measure(b)
    assert mb < exact_union_measure(b, b0, w) < mb + Fraction(eps)


def test_growth_translate_rejects_bad_input():
    b = GridSet.box(2, 1.0, (0, 0), (1, 1))
    with pytest.raises(ValueError):
        find_growth_translate(b, b, 0.0)
    with pytest.raises(ValueError):
        find_growth_translate(b, GridSet(2, 1.0, [(3, 3)]), 0.1)
    with pytest.raises(ValueError):
        find_growth_translate(b, GridSet(2, 1.0, []), 0.1)


def test_enlargement_sequence_budgets():
    b = GridSet.box(2, 0.5, (0, 0), (2, 2))
    steps = enlargement_sequence(b, GridSet(2, 0.5, [(0, 0)]), 0.4, 3)
    assert [s.budget for s in steps] == [0.2, 0.1, 0.05]
    assert all(0 < s.added < s.budget for s in steps)
    assert sum(s.added for s in steps) < 0.4
