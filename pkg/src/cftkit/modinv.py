"""Modular invariants: verification, exact commutant, enumeration,
classification against ADE templates, and extension-to-invariant.

A physical invariant is a nonnegative-integer matrix X with X[0][0] = 1
commuting with S and T.  The solver works on the T-compatible support
first (pairs whose weights differ by an integer), expands XS = SX over
the rational coordinates of Q(zeta) into integer constraint rows, sieves
the rows modulo a prime to pick an independent subset, solves that subset
exactly, and certifies the resulting basis by direct substitution into
the full system (adding violated rows and re-solving if the sieve ever
guessed wrong, so the output is unconditionally exact).
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import ConsistencyError, UsageError
from .exact import Cyclotomic, cyclo_embed, numeric_eval
from .linalg import ModSieve, nullspace, saturated_lattice_basis
from .rcft import ModularData

CACHE_VERSION = 1
# enumeration is promised only at desk scale; larger bases need explicit caps
MAX_ENUM_SIZE = 40


@dataclass(frozen=True)
class ModularInvariant:
    """Nonnegative-integer matrix over a label basis, optionally tagged."""

    basis: tuple
    matrix: tuple[tuple[int, ...], ...]
    tag: Optional[str] = None

    @property
    def size(self) -> int:
        return len(self.matrix)

    def with_tag(self, tag: str) -> "ModularInvariant":
        return ModularInvariant(self.basis, self.matrix, tag)


@dataclass(frozen=True)
class ExtensionDecomposition:
    """Multiplicity vectors over the base labels, the VOA row first."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise UsageError("decomposition needs at least the VOA row")
        if self.rows[0][0] != 1:
            raise UsageError("VOA row must contain the vacuum exactly once")
        for row in self.rows:
            if any(v < 0 for v in row):
                raise UsageError("multiplicities must be nonnegative")


@dataclass
class InvariantReport:
    passed: bool
    axiom: Optional[str] = None
    witness: object = None


def t_mask(data: ModularData) -> list[tuple[int, int]]:
    """Pairs (i, j) with h_i - h_j an integer, vacuum pair first."""
    n = data.size
    h = data.weights
    pairs = [(i, j) for i in range(n) for j in range(n)
             if (h[i] - h[j]).denominator == 1]
    pairs.remove((0, 0))
    return [(0, 0)] + pairs


def _column_support(matrix) -> list[list[int]]:
    n = len(matrix)
    cols = [[] for _ in range(n)]
    for k in range(n):
        for j in range(n):
            if matrix[k][j]:
                cols[j].append(k)
    return cols


def _commute_violation(matrix, data: ModularData, order: int):
    """First (i, j) with (XS)_{ij} != (SX)_{ij}, or None.

    Streams S rows so large lazy matrices never materialize; entries of
    ``matrix`` may be ints or Fractions.  Large integer matrices take a
    column-streaming numpy path that exploits the symmetry of S.
    """
    n = data.size
    if n > 100 and all(isinstance(v, int) for row in matrix for v in row):
        return _commute_violation_large(matrix, data, order)
    col_supp = _column_support(matrix)

    def lifted_row(i):
        return tuple(x if x.order == order else cyclo_embed(x, order)
                     for x in data.s_row(i))

    for i in range(n):
        srow_i = lifted_row(i)
        supp_i = [k for k in range(n) if matrix[i][k]]
        rows_k = {k: lifted_row(k) for k in supp_i}
        for j in range(n):
            lhs = None
            for k in supp_i:
                term = rows_k[k][j] * matrix[i][k]
                lhs = term if lhs is None else lhs + term
            rhs = None
            for k in col_supp[j]:
                term = srow_i[k] * matrix[k][j]
                rhs = term if rhs is None else rhs + term
            if lhs is None and rhs is None:
                continue
            if lhs is None:
                lhs = Cyclotomic.zero(order)
            if rhs is None:
                rhs = Cyclotomic.zero(order)
            if lhs != rhs:
                return (i, j)
    return None


def _commute_violation_large(matrix, data: ModularData, order: int):
    """Column-streaming commutation check for big lazy S matrices.

    Uses S symmetry: (XS)_{ij} = sum_k X_ik S_jk needs only row j, and
    (SX)_{ij} = sum_k X_kj S_ki needs only rows k in the support of
    column j, so columns sharing support reuse the same few rows.
    """
    import numpy as np
    from functools import lru_cache

    n = data.size
    col_supp = _column_support(matrix)
    row_supp = [[k for k in range(n) if matrix[i][k]] for i in range(n)]

    @lru_cache(maxsize=16)
    def row_array(i: int):
        row = data.s_row(i)
        phi = len(row[0]._num)
        arr = np.empty((n, phi), dtype=np.int64)
        for k, x in enumerate(row):
            if x.order != order or x._den != 1:
                raise ConsistencyError("unexpected S entry form", witness=(i, k))
            arr[k, :] = x._num
        return arr

    # group columns by their support so the support rows stay cached
    order_cols = sorted(range(n), key=lambda j: (tuple(col_supp[j]), j))
    for j in order_cols:
        rj = row_array(j)
        sx = None
        for k in col_supp[j]:
            term = matrix[k][j] * row_array(k)
            sx = term if sx is None else sx + term
        phi = rj.shape[1]
        if sx is None:
            sx = np.zeros((n, phi), dtype=np.int64)
        xs = np.zeros((n, phi), dtype=np.int64)
        for i in range(n):
            for k in row_supp[i]:
                xs[i] += matrix[i][k] * rj[k]
        if not np.array_equal(xs, sx):
            i = int(np.nonzero((xs != sx).any(axis=1))[0][0])
            return (i, j)
    return None


def verify_invariant(X: ModularInvariant, data: ModularData) -> InvariantReport:
    """Exact check of (M1) nonnegative integers, (M2) X00 = 1,
    (M3a) XS = SX, (M3b) T-compatible support."""
    n = data.size
    if X.size != n:
        raise UsageError(f"matrix size {X.size} != data size {n}")
    for i in range(n):
        for j in range(n):
            v = X.matrix[i][j]
            if not isinstance(v, int) or v < 0:
                return InvariantReport(False, "M1", (i, j, v))
    if X.matrix[0][0] != 1:
        return InvariantReport(False, "M2", X.matrix[0][0])
    h = data.weights
    for i in range(n):
        for j in range(n):
            if X.matrix[i][j] and (h[i] - h[j]).denominator != 1:
                return InvariantReport(False, "M3b", (i, j, str(h[i] - h[j])))
    bad = _commute_violation(X.matrix, data, data.s_order)
    if bad is not None:
        return InvariantReport(False, "M3a", bad)
    return InvariantReport(True)


# ---------------------------------------------------------------------------
# commutant


def _equation_rows(data, mask_index, i, j, order, srow_i, srows):
    """Integer coordinate rows of equation (XS - SX)_{ij} = 0.

    srows maps k -> lifted S row k (needed for k with (i,k) masked);
    srow_i is the lifted row i.  Yields sparse dicts unknown -> int.
    """
    coeff: dict[int, Cyclotomic] = {}
    n = data.size
    for k in range(n):
        u = mask_index.get((i, k))
        if u is not None:
            coeff[u] = coeff.get(u, Cyclotomic.zero(order)) + srows[k][j]
        u = mask_index.get((k, j))
        if u is not None:
            coeff[u] = coeff.get(u, Cyclotomic.zero(order)) - srow_i[k]
    vecs = {}
    phi = None
    for u, c in coeff.items():
        if c.is_zero:
            continue
        c = c if c.order == order else cyclo_embed(c, order)
        if c._den != 1:
            raise ConsistencyError("non-integral S coordinates", witness=(i, j))
        vecs[u] = c._num
        phi = len(c._num)
    if not vecs:
        return
    for comp in range(phi):
        row = {u: v[comp] for u, v in vecs.items() if v[comp]}
        if row:
            yield row


def _commutant(data: ModularData) -> tuple[list[tuple[int, int]], list[tuple[Fraction, ...]]]:
    """(mask, basis vectors over the mask) of {X : XS = SX, T-compatible}."""
    mask = t_mask(data)
    mask_index = {p: u for u, p in enumerate(mask)}
    nu = len(mask)
    order = data.s_order
    n = data.size

    def lifted_row(i):
        return tuple(x if x.order == order else cyclo_embed(x, order)
                     for x in data.s_row(i))

    srows = [lifted_row(i) for i in range(n)]
    sieve = ModSieve(nu)
    selected: list[dict[int, int]] = []
    for i in range(n):
        for j in range(n):
            if sieve.rank == nu:
                break
            for row in _equation_rows(data, mask_index, i, j, order, srows[i], srows):
                if sieve.add_sparse(row):
                    selected.append(row)
                    if sieve.rank == nu:
                        break

    def solve(rows):
        dense = [[Fraction(r.get(u, 0)) for u in range(nu)] for r in rows]
        return nullspace(dense, nu)

    basis = solve(selected)
    # certify: every basis vector must satisfy the *full* system; a sieve
    # false-negative shows up here and the violated rows are added exactly
    while basis:
        bad = None
        for vec in basis:
            matrix = [[Fraction(0)] * n for _ in range(n)]
            for (i, j), v in zip(mask, vec):
                matrix[i][j] = v
            hit = _commute_violation(matrix, data, order)
            if hit is not None:
                bad = hit
                break
        if bad is None:
            break
        added = False
        for row in _equation_rows(data, mask_index, bad[0], bad[1], order,
                                  srows[bad[0]], srows):
            sieve.add_sparse(row)
            selected.append(row)
            added = True
        if not added:
            raise ConsistencyError("violated equation produced no rows", witness=bad)
        basis = solve(selected)
    return mask, basis


def _cache_path(cache_dir: str, data: ModularData) -> str:
    key = json.dumps({"theory": list(data.theory_id), "version": CACHE_VERSION},
                     sort_keys=True)
    digest = hashlib.sha256(key.encode()).hexdigest()[:32]
    return os.path.join(cache_dir, f"commutant-{digest}.json")


def _commutant_cached(data: ModularData, cache_dir: Optional[str] = None):
    if cache_dir is None:
        cache_dir = os.environ.get("CFTKIT_CACHE_DIR") or None
    if cache_dir is None:
        return _commutant(data)
    path = _cache_path(cache_dir, data)
    if os.path.exists(path):
        with open(path) as fh:
            doc = json.load(fh)
        mask = [tuple(p) for p in doc["mask"]]
        basis = [tuple(Fraction(x) for x in vec) for vec in doc["vectors"]]
        return mask, basis
    mask, basis = _commutant(data)
    os.makedirs(cache_dir, exist_ok=True)
    doc = {"mask": [list(p) for p in mask],
           "vectors": [[str(x) for x in vec] for vec in basis]}
    tmp = path + f".tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        json.dump(doc, fh)
    os.replace(tmp, path)
    return mask, basis


def commutant_basis(data: ModularData, cache_dir: Optional[str] = None
                    ) -> list[tuple[tuple[Fraction, ...], ...]]:
    """Exact rational basis of the T-masked commutant, as full matrices."""
    mask, basis = _commutant_cached(data, cache_dir)
    n = data.size
    out = []
    for vec in basis:
        matrix = [[Fraction(0)] * n for _ in range(n)]
        for (i, j), v in zip(mask, vec):
            matrix[i][j] = v
        out.append(tuple(tuple(row) for row in matrix))
    return out


# ---------------------------------------------------------------------------
# enumeration


def _entry_caps(data: ModularData, mask, caps, precision_bits: int):
    """Per-unknown [lo, hi] bounds; hi from the quantum-dimension product."""
    if isinstance(caps, int):
        cap_fn = lambda i, j: caps  # noqa: E731
    elif isinstance(caps, dict):
        cap_fn = lambda i, j: caps.get((i, j), 0)  # noqa: E731
    else:
        row0 = data.s_row(0)
        from .exact import cyclo_inv
        inv00 = cyclo_inv(row0[0])
        ups = []
        for i in range(data.size):
            ball = numeric_eval(row0[i] * inv00, precision_bits)
            ups.append(ball.upper_abs())
        cap_fn = lambda i, j: int(ups[i] * ups[j])  # noqa: E731
    bounds = []
    for (i, j) in mask:
        if (i, j) == (0, 0):
            bounds.append((1, 1))
        else:
            bounds.append((0, cap_fn(i, j)))
    return bounds


def enumerate_physical(data: ModularData, caps: Union[int, dict, None] = None,
                       precision_bits: int = 128) -> list[ModularInvariant]:
    """All physical invariants, by bounded lattice-point search.

    The integer points of the commutant span form a lattice (computed by
    saturation); entries are bounded by the quantum-dimension product, a
    rigorous upper bound evaluated with interval arithmetic, so the
    depth-first search is exhaustive.
    """
    n = data.size
    if n > MAX_ENUM_SIZE and caps is None:
        raise UsageError(
            f"enumeration over {n} labels needs explicit entry caps "
            f"(size limit {MAX_ENUM_SIZE}); pass caps= or verify candidates instead")
    mask, basis = _commutant_cached(data)
    if not basis:
        return []
    nu = len(mask)
    lattice = saturated_lattice_basis(basis, nu)
    if not lattice:
        return []
    bounds = _entry_caps(data, mask, caps, precision_bits)
    pivots = [next(c for c, v in enumerate(row) if v) for row in lattice]
    d = len(lattice)
    partial = [0] * nu
    found: list[list[int]] = []

    def check_cols(lo: int, hi: int) -> bool:
        for c in range(lo, hi):
            v = partial[c]
            if v < bounds[c][0] or v > bounds[c][1]:
                return False
        return True

    def dfs(t: int, checked: int) -> None:
        nxt = pivots[t] if t < d else nu
        if not check_cols(checked, nxt):
            return
        if t == d:
            found.append(list(partial))
            return
        p = pivots[t]
        hv = lattice[t][p]
        base = partial[p]
        lo, hi = bounds[p]
        cmin = -((base - lo) // hv)          # ceil((lo - base)/hv)
        cmax = (hi - base) // hv             # floor((hi - base)/hv)
        for c in range(cmin, cmax + 1):
            if c:
                for u, v in enumerate(lattice[t]):
                    if v:
                        partial[u] += c * v
            dfs(t + 1, nxt)
            if c:
                for u, v in enumerate(lattice[t]):
                    if v:
                        partial[u] -= c * v

    dfs(0, 0)
    out = []
    seen = set()
    for x in found:
        matrix = [[0] * n for _ in range(n)]
        for (i, j), v in zip(mask, x):
            matrix[i][j] = v
        inv = ModularInvariant(tuple(data.labels),
                               tuple(tuple(row) for row in matrix))
        if inv.matrix in seen:
            continue
        rep = verify_invariant(inv, data)
        if not rep.passed:
            continue
        seen.add(inv.matrix)
        out.append(inv.with_tag(classify_invariant(inv, data)))
    out.sort(key=lambda inv: inv.matrix)
    return out


# ---------------------------------------------------------------------------
# templates and classification


def _sl2_template(tag: str, level: int) -> Optional[list[list[int]]]:
    """Structural ADE template matrix on labels j = 0..level, or None."""
    n = level + 1
    if tag == "A":
        return [[int(i == j) for j in range(n)] for i in range(n)]
    if tag == "D_even":
        if level % 4 != 0 or level == 0:
            return None
        half = level // 2
        mat = [[0] * n for _ in range(n)]
        for j in range(0, half, 2):
            for a in (j, level - j):
                for b in (j, level - j):
                    mat[a][b] += 1
        mat[half][half] += 2
        return mat
    if tag == "D_odd":
        if level % 4 != 2:
            return None
        mat = [[0] * n for _ in range(n)]
        for j in range(n):
            mat[j][j if j % 2 == 0 else level - j] = 1
        return mat
    blocks = {"E6": (10, [(0, 6), (3, 7), (4, 10)]),
              "E8": (28, [(0, 10, 18, 28), (6, 12, 16, 22)])}
    if tag in blocks:
        lvl, blks = blocks[tag]
        if level != lvl:
            return None
        mat = [[0] * n for _ in range(n)]
        for blk in blks:
            for a in blk:
                for b in blk:
                    mat[a][b] += 1
        return mat
    if tag == "E7":
        if level != 16:
            return None
        mat = [[0] * n for _ in range(n)]
        for blk in ((0, 16), (4, 12), (6, 10)):
            for a in blk:
                for b in blk:
                    mat[a][b] += 1
        mat[8][8] += 1
        for a in (2, 14):
            mat[a][8] += 1
            mat[8][a] += 1
        return mat
    return None


def _sl2_expected_tags(level: int) -> list[str]:
    tags = ["A"]
    if level > 0 and level % 4 == 0:
        tags.append("D_even")
    if level % 4 == 2:
        tags.append("D_odd")
    if level == 10:
        tags.append("E6")
    if level == 16:
        tags.append("E7")
    if level == 28:
        tags.append("E8")
    return tags


def _minimal_pair_tags(m: int) -> list[tuple[str, str]]:
    tags: list[tuple[str, str]] = [("A", "A")]
    if m % 2 == 0:
        tags.append(("D_even" if m % 4 == 0 else "D_odd", "A"))
    else:
        lvl = m + 1
        tags.append(("A", "D_even" if lvl % 4 == 0 else "D_odd"))
    if m == 10:
        tags.append(("E6", "A"))
    if m == 9:
        tags.append(("A", "E6"))
    if m == 16:
        tags.append(("E7", "A"))
    if m == 15:
        tags.append(("A", "E7"))
    if m == 28:
        tags.append(("E8", "A"))
    if m == 27:
        tags.append(("A", "E8"))
    return tags


def _minimal_template(m: int, tag_r: str, tag_s: str, labels) -> Optional[tuple]:
    """Push the product of two sl2-level templates to the Kac quotient."""
    x1 = _sl2_template(tag_r, m)
    x2 = _sl2_template(tag_s, m + 1)
    if x1 is None or x2 is None:
        return None
    p, pp = m + 2, m + 3
    index = {(lab.r, lab.s): t for t, lab in enumerate(labels)}
    n = len(labels)
    mat = [[0] * n for _ in range(n)]
    for a, la in enumerate(labels):
        reps = [(la.r, la.s), (p - la.r, pp - la.s)]
        for b, lb in enumerate(labels):
            total = 0
            for (r, s) in reps:
                total += x1[r - 1][lb.r - 1] * x2[s - 1][lb.s - 1]
            mat[a][b] = total
    return tuple(tuple(row) for row in mat)


def expected_invariants(data: ModularData) -> list[tuple[str, ModularInvariant]]:
    """The classification table rows, generated from structural templates
    and deduplicated when a degenerate parameter collapses two rows."""
    family, param = data.theory_id
    out: list[tuple[str, ModularInvariant]] = []
    seen = set()
    if family == "sl2":
        for tag in _sl2_expected_tags(param):
            mat = _sl2_template(tag, param)
            if mat is None:
                continue
            key = tuple(tuple(row) for row in mat)
            if key in seen:
                continue
            seen.add(key)
            out.append((tag, ModularInvariant(tuple(data.labels), key, tag)))
    elif family == "minimal":
        for tag_r, tag_s in _minimal_pair_tags(param):
            key = _minimal_template(param, tag_r, tag_s, data.labels)
            if key is None or key in seen:
                continue
            seen.add(key)
            tag = f"({tag_r},{tag_s})"
            out.append((tag, ModularInvariant(tuple(data.labels), key, tag)))
    else:
        raise UsageError(f"no invariant table for theory {family}")
    return out


def classify_invariant(X: ModularInvariant, data: ModularData) -> str:
    """Tag of the matching structural template, or "unknown"."""
    for tag, inv in expected_invariants(data):
        if inv.matrix == X.matrix:
            return tag
    return "unknown"


def invariant_from_extension(dec: ExtensionDecomposition,
                             data: ModularData) -> ModularInvariant:
    """X = sum over decomposition rows v of v v^T, then fully verified."""
    n = data.size
    for row in dec.rows:
        if len(row) != n:
            raise UsageError(f"row length {len(row)} != data size {n}")
    mat = [[0] * n for _ in range(n)]
    for row in dec.rows:
        for i, vi in enumerate(row):
            if vi:
                for j, vj in enumerate(row):
                    if vj:
                        mat[i][j] += vi * vj
    inv = ModularInvariant(tuple(data.labels), tuple(tuple(r) for r in mat))
    rep = verify_invariant(inv, data)
    if not rep.passed:
        raise ConsistencyError(
            f"extension decomposition does not give a modular invariant "
            f"(axiom {rep.axiom})", witness=rep.witness)
    return inv.with_tag(classify_invariant(inv, data))
