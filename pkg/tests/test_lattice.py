from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from substrate import oracles
from substrate.errors import ValidationError
from substrate.lattice import (PeriodGroup, char_poly, check_invariance, coset_representatives, det, hnf,
                               index_of_inflated, inflate_periods, is_expansive, matmul, snf, snf_diagonal)

small = st.integers(-6, 6)
square = st.integers(2, 3).flatmap(lambda m: st.lists(st.lists(small, min_size=m, max_size=m), min_size=m, max_size=m))


def _det(m):
    return int(det([[Fraction(v) for v in row] for row in m]))


@settings(max_examples=200)
@given(square)
def test_snf_decomposition(m):
    D, U, V = snf(m)
    assert matmul(matmul(U, m), V) == D
    assert abs(_det(U)) == 1 and abs(_det(V)) == 1
    diag = [D[i][i] for i in range(len(D))]
    assert all(D[i][j] == 0 for i in range(len(D)) for j in range(len(D)) if i != j)
    assert all(x >= 0 for x in diag)
    nz = [x for x in diag if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert diag[len(nz):] == [0] * (len(diag) - len(nz))
    prod = 1
    for x in diag:
        prod *= x
    assert prod == abs(_det(m))


@pytest.mark.parametrize("m, diag", [
    ([[2, 4, 4], [-6, 6, 12], [10, -4, -16]], [2, 6, 12]),
    ([[12, 6, 4, 8], [3, 9, 6, 12], [2, 16, 14, 28], [20, 10, 10, 20]], [1, 10, 30, 0]),
    ([[0, 0], [0, 0]], [0, 0]),
])
def test_snf_examples(m, diag):
    assert snf_diagonal(m) == diag


@given(st.lists(st.tuples(small, small), min_size=1, max_size=4))
def test_hnf_is_canonical(cols):
    h = hnf(cols)
    assert hnf(list(reversed(cols))) == h
    assert hnf(list(h)) == h
    assert hnf(cols + [tuple(a + b for a, b in zip(cols[0], cols[-1]))]) == h


@st.composite
def invariant_lattices(draw):
    L = [[draw(st.integers(-3, 3)) for _ in range(2)] for _ in range(2)]
    assume(L[0][0] * L[1][1] - L[0][1] * L[1][0] != 0)
    v = (draw(st.integers(-3, 3)), draw(st.integers(-3, 3)))
    Lv = (L[0][0] * v[0] + L[0][1] * v[1], L[1][0] * v[0] + L[1][1] * v[1])
    c = draw(st.integers(1, 4))
    gens = tuple(g for g in (v, Lv, (c, 0), (0, c)) if any(g))
    return L, PeriodGroup(2, (), gens)


@settings(max_examples=60, deadline=None)
@given(invariant_lattices(), st.integers(1, 2))
def test_index_against_point_count(data, n):
    L, K = data
    assert check_invariance(K, L)
    assert index_of_inflated(K, L, n) == oracles.lattice_index(L, [list(b) for b in K.lattice], n)
    assert len(coset_representatives(K, L, n)) == index_of_inflated(K, L, n)


def test_index_one_dimensional():
    K = PeriodGroup(1, (), ((1,),))
    assert index_of_inflated(K, [[5]], 2) == 25
    assert index_of_inflated(PeriodGroup(1, (), ((5,),)), [[5]], 1) == 5
    assert index_of_inflated(PeriodGroup.trivial(1), [[2]], 3) == 1


def test_inflate_periods_scales_lattice():
    K = PeriodGroup(2, (), ((1, 0), (0, 2)))
    assert inflate_periods(K, [[2, 0], [0, 2]]).lattice == hnf([(2, 0), (0, 4)])


def test_subspace_contributes_nothing():
    K = PeriodGroup(2, ((1, 0),), ((0, 1),))
    assert index_of_inflated(K, [[2, 0], [0, 3]], 1) == 3


def test_dependent_subspace_rejected():
    with pytest.raises(ValidationError):
        PeriodGroup(2, ((1, 0), (2, 0)), ())


@pytest.mark.parametrize("L, expected", [
    ([[2, 0], [0, 2]], True), ([[1, 1], [1, 0]], False), ([[2, 1], [1, 1]], False), ([[0, 2], [2, 0]], True),
    ([[3]], True), ([[1]], False),
])
def test_expansive(L, expected):
    assert is_expansive(L) is expected


def test_char_poly():
    assert char_poly([[Fraction(1), Fraction(1)], [Fraction(1), Fraction(0)]]) == [-1, -1, 1]
