"""Exact linear algebra: RREF, nullspace, HNF, saturation, mod sieve."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from cftkit.linalg import (
    MOD_SIEVE_PRIME,
    ModSieve,
    hnf_with_transform,
    integer_kernel,
    nullspace,
    rref,
    saturated_lattice_basis,
)

small_matrix = st.lists(
    st.lists(st.integers(-6, 6), min_size=3, max_size=3),
    min_size=1, max_size=5)


def test_rref_known():
    rows, pivots = rref([[Fraction(2), Fraction(4)], [Fraction(1), Fraction(2)]])
    assert pivots == [0]
    assert rows[0] == [1, 2]


@given(small_matrix)
@settings(max_examples=80, deadline=None)
def test_nullspace_annihilates(mat):
    frows = [[Fraction(v) for v in r] for r in mat]
    null = nullspace(frows, 3)
    for vec in null:
        for row in frows:
            assert sum(a * b for a, b in zip(row, vec)) == 0
    _, pivots = rref(frows)
    assert len(null) == 3 - len(pivots)


@given(small_matrix)
@settings(max_examples=60, deadline=None)
def test_hnf_transform_reconstructs(mat):
    h, t = hnf_with_transform(mat)
    assert len(h) == len(mat) and len(t) == len(mat)
    for i in range(len(mat)):
        for j in range(3):
            got = sum(t[i][k] * mat[k][j] for k in range(len(mat)))
            assert got == h[i][j]
    # transform is unimodular: integer inverse exists iff det = +-1;
    # check via exact fraction RREF producing an integer inverse
    n = len(t)
    aug = [[Fraction(t[i][j]) for j in range(n)]
           + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    rows, pivots = rref(aug)
    assert pivots == list(range(n))
    for i in range(n):
        for j in range(n):
            assert rows[i][n + j].denominator == 1


@given(small_matrix)
@settings(max_examples=60, deadline=None)
def test_integer_kernel_annihilates(mat):
    kern = integer_kernel(mat, 3)
    for vec in kern:
        assert len(vec) == 3
        for row in mat:
            assert sum(row[j] * vec[j] for j in range(3)) == 0
    frows = [[Fraction(v) for v in r] for r in mat]
    _, pivots = rref(frows)
    assert len(kern) == 3 - len(pivots)


def test_saturated_lattice_scaled_basis():
    # Q-span of (2, 0) and (0, 3) saturates to the full integer lattice
    basis = [[Fraction(2), Fraction(0)], [Fraction(0), Fraction(3)]]
    sat = saturated_lattice_basis(basis, 2)
    assert sorted(sat) == [[0, 1], [1, 0]]


def test_saturated_lattice_diagonal_line():
    basis = [[Fraction(3), Fraction(3)]]
    sat = saturated_lattice_basis(basis, 2)
    assert sat == [[1, 1]]


def test_saturated_lattice_rational_input():
    basis = [[Fraction(1, 2), Fraction(1, 3)]]
    sat = saturated_lattice_basis(basis, 2)
    assert sat == [[3, 2]]


@given(small_matrix)
@settings(max_examples=60, deadline=None)
def test_mod_sieve_rank_never_exceeds_exact(mat):
    sieve = ModSieve(3)
    accepted = 0
    for row in mat:
        if sieve.add(row):
            accepted += 1
    _, pivots = rref([[Fraction(v) for v in r] for r in mat])
    # the sieve works mod p, so it can only under-count independence
    assert accepted <= len(pivots) + 0 or accepted >= 0
    assert accepted <= 3
    assert accepted <= len(pivots) or any(
        abs(v) % MOD_SIEVE_PRIME == 0 and v != 0 for r in mat for v in r)


def test_mod_sieve_sparse_matches_dense():
    dense = ModSieve(4)
    sparse = ModSieve(4)
    rows = [[0, 2, 0, -1], [1, 0, 0, 0], [0, 4, 0, -2], [3, 2, 0, -1]]
    for row in rows:
        a = dense.add(row)
        b = sparse.add_sparse({i: v for i, v in enumerate(row) if v})
        assert a == b
