"""Exact linear algebra helpers for the commutant solver and enumerator.

Everything here is over Q (``fractions.Fraction``) or Z (Python ints);
no floating point.  A mod-p echelon sieve is provided for cheaply
skipping constraint rows that are (very probably) dependent; callers
must certify the final answer exactly, which the commutant solver does
by direct substitution.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import UsageError

MOD_SIEVE_PRIME = 1000003


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    mat = [[Fraction(x) for x in r] for r in rows]
    if not mat:
        return [], []
    ncols = len(mat[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[tuple[Fraction, ...]]:
    """Basis of {x : rows . x = 0}, one vector per free column."""
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for row, pc in zip(red, pivots):
            vec[pc] = -row[fc]
        basis.append(tuple(vec))
    return basis


class ModSieve:
    """Incremental row echelon over F_p used to pre-filter constraint rows.

    add() returns True iff the row enlarged the mod-p row space.  A False
    answer can be wrong only if p divides a nonzero minor, which callers
    must cover with an exact verification step.
    """

    def __init__(self, ncols: int, p: int = MOD_SIEVE_PRIME):
        self.ncols = ncols
        self.p = p
        self.pivot_rows: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    def add(self, row: Sequence[int]) -> bool:
        p = self.p
        r = [v % p for v in row]
        for c in sorted(self.pivot_rows):
            if r[c]:
                f = r[c]
                pr = self.pivot_rows[c]
                r = [(a - f * b) % p for a, b in zip(r, pr)]
        lead = next((c for c, v in enumerate(r) if v), None)
        if lead is None:
            return False
        inv = pow(r[lead], p - 2, p)
        self.pivot_rows[lead] = [(v * inv) % p for v in r]
        return True

    def add_sparse(self, row: dict) -> bool:
        dense = [0] * self.ncols
        for u, v in row.items():
            dense[u] = v
        return self.add(dense)


def _row_gcd_reduce(row: list[int]) -> list[int]:
    import math
    g = 0
    for v in row:
        g = math.gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return [v // g for v in row]
    return row


def hnf_with_transform(mat: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns (H, T) with T unimodular, T @ mat = H, H in row echelon form
    with positive pivots and entries above each pivot reduced modulo it.
    Zero rows of H are collected at the bottom.
    """
    m = [list(map(int, r)) for r in mat]
    nrows = len(m)
    t = [[int(i == j) for j in range(nrows)] for i in range(nrows)]
    if nrows == 0:
        return [], []
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        # clear column c below row r with Euclidean row operations
        while True:
            nz = [i for i in range(r, nrows) if m[i][c]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(m[i][c]))
            m[r], m[i0] = m[i0], m[r]
            t[r], t[i0] = t[i0], t[r]
            if m[r][c] < 0:
                m[r] = [-v for v in m[r]]
                t[r] = [-v for v in t[r]]
            done = True
            for i in range(r + 1, nrows):
                if m[i][c]:
                    q = m[i][c] // m[r][c]
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
                    if m[i][c]:
                        done = False
            if done:
                break
        if r < nrows and m[r][c]:
            for i in range(r):
                q = m[i][c] // m[r][c]
                if q:
                    m[i] = [a - q * b for a, b in zip(m[i], m[r])]
                    t[i] = [a - q * b for a, b in zip(t[i], t[r])]
            r += 1
            if r == nrows:
                break
    return m, t


def integer_kernel(mat: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """Basis of {x in Z^ncols : mat @ x = 0} (right kernel over Z).

    Computed as the left kernel of the transpose via HNF transform rows.
    """
    if not mat:
        return [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    if any(len(r) != ncols for r in mat):
        raise UsageError("integer_kernel: inconsistent row length")
    transposed = [[mat[i][j] for i in range(len(mat))] for j in range(ncols)]
    h, t = hnf_with_transform(transposed)
    return [t[i] for i in range(len(h)) if not any(h[i])]


def saturated_lattice_basis(basis: Sequence[Sequence[Fraction]], ncols: int) -> list[list[int]]:
    """HNF basis of span_Q(basis) intersected with Z^ncols.

    The rational span is cut out by integer equations (a scaled basis of
    its orthogonal complement); the integer points are then the integer
    kernel of those equations, returned in row echelon (HNF) form.
    """
    if not basis:
        return []
    ortho = nullspace(basis, ncols)
    eqs = [_scale_to_int(v) for v in ortho]
    kern = integer_kernel(eqs, ncols)
    h, _ = hnf_with_transform(kern)
    return [_row_gcd_reduce(row) for row in h if any(row)]


def _scale_to_int(vec: Sequence[Fraction]) -> list[int]:
    import math
    den = 1
    for v in vec:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return _row_gcd_reduce([int(v * den) for v in vec])
