from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from cobordism import intlattice as lat

entries = st.integers(-6, 6)


@st.composite
def matrices(draw, max_rows=4, max_cols=5):
    nr = draw(st.integers(1, max_rows))
    nc = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(entries, min_size=nc, max_size=nc), min_size=nr, max_size=nr))
    return rows, nc


def sparse(rows):
    return [{j: v for j, v in enumerate(r) if v} for r in rows]


def dense(vec, nc):
    return [vec.get(j, 0) for j in range(nc)]


def lattice_det(rows, nc):
    """(rank, gcd of maximal minors) of the lattice spanned by ``rows``."""
    M = sympy.Matrix(rows) if rows else sympy.zeros(0, nc)
    r = M.rank()
    if r == 0:
        return 0, 1
    g = 0
    for ri in combinations(range(M.rows), r):
        for ci in combinations(range(nc), r):
            g = sympy.igcd(g, M.extract(list(ri), list(ci)).det())
    return r, g


def in_lattice(vec, basis, nc):
    """``vec`` lies in the row lattice of ``basis`` iff adding it changes
    neither the rank nor the determinant."""
    rows = [dense(b, nc) for b in basis]
    return lattice_det(rows, nc) == lattice_det(rows + [list(vec)], nc)


@given(matrices())
def test_hermite_spans_same_lattice(data):
    rows, nc = data
    h = lat.hermite(sparse(rows))
    for r in rows:
        assert in_lattice(r, h, nc)
    for b in h:
        assert in_lattice(dense(b, nc), sparse(rows), nc)


@given(matrices())
def test_hermite_is_canonical(data):
    rows, nc = data
    h = lat.hermite(sparse(rows))
    leads = [min(r) for r in h]
    assert leads == sorted(set(leads))
    for k, r in enumerate(h):
        p = r[leads[k]]
        assert p > 0
        for other in h[:k]:
            assert 0 <= other.get(leads[k], 0) < p
    # insertion order does not matter
    assert lat.hermite(sparse(rows[::-1])) == h


@given(matrices())
def test_rank_q_matches_sympy(data):
    rows, nc = data
    assert lat.rank_q(sparse(rows)) == sympy.Matrix(rows).rank()


@given(matrices())
def test_integer_kernel_is_saturated_kernel(data):
    rows, nc = data
    kern = lat.integer_kernel(sparse(rows), nc)
    for k in kern:
        assert all(lat.dot(r, k) == 0 for r in sparse(rows))
    assert len(kern) == nc - sympy.Matrix(rows).rank()
    # saturated: the maximal minors are coprime
    if kern:
        assert lattice_det([dense(k, nc) for k in kern], nc)[1] == 1


def test_solve_sections():
    p_rows = [{0: 1, 1: 3}, {1: 2, 2: 5}]
    sols = lat.solve_sections(p_rows, 3)
    for k, s in enumerate(sols):
        assert [lat.dot(r, s) for r in p_rows] == [int(i == k) for i in range(2)]
    with pytest.raises(ValueError):
        lat.solve_sections([{0: 2, 1: 4}], 2)


def test_size_budget():
    h = lat.HermiteBasis(max_rows=2)
    h.add({0: 1})
    h.add({1: 1})
    with pytest.raises(lat.LatticeSizeError):
        h.add({2: 1})


def test_rank_q_fraction_free_inputs():
    assert lat.rank_q([{0: Fraction(1, 2)}, {0: 3}]) == 1
