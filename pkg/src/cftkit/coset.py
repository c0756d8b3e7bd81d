"""GKO coset decompositions, extension constructions, and the two
classification decision procedures.

The GKO branching pairs the level-m affine module n (tensored with the
level-1 module eps) with minimal-model labels (n+1, s+1) against level
m+1 affine labels s of matching parity; verify_gko checks the resulting
two-variable character identity coefficient by coefficient.  The coset
and mirror constructions move integral-weight extensions between the
affine and Virasoro sides of that pairing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .errors import ConsistencyError, UsageError
from .exact import Cyclotomic, cyclo_embed
from .minimal import (KacLabel, kac_canonical, minimal_central_charge,
                      minimal_character, minimal_labels, minimal_modular_data,
                      minimal_weight)
from .modinv import ExtensionDecomposition
from .qseries import series_mul
from .rcft import (ModularData, check_modular_relations,
                   conjugation_rows_monomial)
from .sl2 import sl2_central_charge, sl2_character, sl2_weight


@dataclass(frozen=True)
class BranchingRule:
    """Vacuum-sector pairing of minimal labels with level m+1 labels."""

    m: int
    n: int
    eps: int
    pairs: tuple[tuple[KacLabel, int], ...]


@dataclass(frozen=True)
class ExtensionSpec:
    """A VOA extension: base theory plus summand multiset.

    base is ("sl2", k) or ("minimal", m); summands are (label, mult)
    pairs with the vacuum first at multiplicity 1; unitary is True or
    the string "unknown".
    """

    base: tuple
    summands: tuple[tuple[object, int], ...]
    name: str = ""
    unitary: Union[bool, str] = True

    def __post_init__(self):
        if not self.summands:
            raise UsageError("extension needs at least the vacuum summand")
        vac_label, vac_mult = self.summands[0]
        if vac_mult != 1 or not _is_vacuum(self.base, vac_label):
            raise UsageError("vacuum summand must come first with multiplicity 1")

    def labels(self) -> list:
        return [lab for lab, _ in self.summands]


@dataclass(frozen=True)
class NamedVOA:
    """Outcome of the classification decision procedures."""

    tag: str
    param: int

    _ALLOWED = {
        "sl2-diagonal": None, "sl2-simple-current": None,
        "sl2-E6": (10,), "sl2-E8": (28,),
        "minimal-diagonal": None, "minimal-D": None,
        "minimal-E6-coset": (10,), "minimal-E6-mirror": (9,),
        "minimal-E8-coset": (28,), "minimal-E8-mirror": (27,),
    }

    def __post_init__(self):
        if self.tag not in self._ALLOWED:
            raise UsageError(f"unknown classification tag {self.tag}")
        allowed = self._ALLOWED[self.tag]
        if allowed is not None and self.param not in allowed:
            raise UsageError(f"tag {self.tag} incompatible with parameter {self.param}")


@dataclass(frozen=True)
class Rejection:
    """Negative classification outcome with the failed condition."""

    reason: str


def _is_vacuum(base, label) -> bool:
    family = base[0]
    if family == "sl2":
        return label == 0
    if family == "minimal":
        return (label.r, label.s) == (1, 1)
    raise UsageError(f"unknown base theory {family}")


def _summand_weight(base, label) -> Fraction:
    family, param = base
    if family == "sl2":
        return sl2_weight(param, label)
    if family == "minimal":
        return minimal_weight(param, label.r, label.s)
    raise UsageError(f"unknown base theory {family}")


# ---------------------------------------------------------------------------
# GKO


def gko_decomposition(m: int, n: int, eps: int) -> BranchingRule:
    """Pairs ((n+1, s+1) canonical, s) over s = 0..m+1 with s = n+eps mod 2."""
    if not (0 <= n <= m):
        raise UsageError(f"need 0 <= n <= m, got n={n}, m={m}")
    if eps not in (0, 1):
        raise UsageError(f"eps must be 0 or 1, got {eps}")
    pairs = []
    for s in range(m + 2):
        if (s - n - eps) % 2 == 0:
            pairs.append((kac_canonical(m, n + 1, s + 1), s))
    return BranchingRule(m, n, eps, tuple(pairs))


@dataclass
class GkoReport:
    passed: bool
    m: int
    n: int
    eps: int
    order_verified: int
    mismatch: object = None


def verify_gko(m: int, n: int, eps: int, order: int) -> GkoReport:
    """Check ch(m,n) * ch(1,eps) = sum over pairs ch_min * ch(m+1,s)
    as a two-variable q,z identity up to the given order."""
    if order < 1:
        raise UsageError(f"order must be >= 1, got {order}")
    rule = gko_decomposition(m, n, eps)
    c_lhs = sl2_central_charge(m) + sl2_central_charge(1)
    c_rhs = minimal_central_charge(m) + sl2_central_charge(m + 1)
    if c_lhs != c_rhs:
        raise ConsistencyError("GKO central charges disagree",
                               witness=(str(c_lhs), str(c_rhs)))
    lhs_lead = (sl2_weight(m, n) - sl2_central_charge(m) / 24
                + sl2_weight(1, eps) - sl2_central_charge(1) / 24)
    # sector offsets are exact weight differences; extend the working
    # order so every summand still contributes `order` aligned terms
    offsets = []
    for kac, s in rule.pairs:
        lead = (minimal_weight(m, kac.r, kac.s) - minimal_central_charge(m) / 24
                + sl2_weight(m + 1, s) - sl2_central_charge(m + 1) / 24)
        off = lead - lhs_lead
        if off.denominator != 1 or off < 0:
            return GkoReport(False, m, n, eps, 0,
                             mismatch=("sector misalignment", (kac.r, kac.s), s, str(off)))
        offsets.append(int(off))
    work = order + max(offsets)
    lhs = series_mul(sl2_character(m, n, work), sl2_character(1, eps, work))
    rhs = None
    for (kac, s), off in zip(rule.pairs, offsets):
        term = series_mul(minimal_character(m, kac, work - off),
                          sl2_character(m + 1, s, work - off))
        rhs = term if rhs is None else rhs + term
    for d in range(order):
        exp = lhs.leading_exponent + d
        a = lhs.coefficient_at(exp)
        b = rhs.coefficient_at(exp)
        from .qseries import _promote
        if _promote(a) != _promote(b):
            return GkoReport(False, m, n, eps, d, mismatch=(d, repr(a), repr(b)))
    return GkoReport(True, m, n, eps, order)


# ---------------------------------------------------------------------------
# extension constructions


def integral_weight_check(ext: ExtensionSpec) -> dict:
    """Per-summand exact weights; passes iff every non-vacuum summand
    has a positive integer weight."""
    rows = []
    ok = True
    for idx, (lab, mult) in enumerate(ext.summands):
        h = _summand_weight(ext.base, lab)
        good = (h == 0) if idx == 0 else (h.denominator == 1 and h > 0)
        ok = ok and good
        rows.append({"label": lab, "multiplicity": mult, "weight": h, "ok": good})
    return {"passed": ok, "summands": rows}


def coset_commutant_extension(k_ext: ExtensionSpec, m: int) -> ExtensionSpec:
    """Transport an integral-weight extension of sl2 level m to its coset
    commutant at minimal model m via the vacuum-sector branching (1-column
    of the Kac table): summand j maps to the canonical label of (j+1, 1)."""
    if k_ext.base != ("sl2", m):
        raise UsageError(f"extension base {k_ext.base} is not sl2 level {m}")
    check = integral_weight_check(k_ext)
    if not check["passed"]:
        raise UsageError(f"summands must have integral weights: {check['summands']}")
    summands = []
    for (j, mult) in k_ext.summands:
        summands.append((kac_canonical(m, j + 1, 1), mult))
    return ExtensionSpec(
        base=("minimal", m),
        summands=tuple(summands),
        name=f"coset-commutant({k_ext.name or 'sl2 ext'}, m={m})",
        unitary=k_ext.unitary,
    )


def _assert_self_conjugate(data: ModularData, indices) -> None:
    """Charge conjugation must fix the given labels: row i of S^2 must be
    lambda at column i and zero elsewhere.  Full C is computed for small
    theories; large lazy theories are checked row by row."""
    n = data.size
    if n <= 60:
        rep = check_modular_relations(data)
        if not rep.passed:
            raise ConsistencyError("modular relations failed", witness=rep.failures)
        for i in indices:
            if rep.charge_conjugation[i] != i:
                raise ConsistencyError("label is not self-conjugate",
                                       witness=data.labels[i])
        return
    sigma = conjugation_rows_monomial(data, list(indices))
    if sigma is not None:
        for i in indices:
            if sigma[i] != i:
                raise ConsistencyError("label is not self-conjugate",
                                       witness=data.labels[i])
        return
    order = data.s_order
    lam = data.s_scale
    rows = [tuple(cyclo_embed(x, order) if x.order != order else x
                  for x in data.s_row(k)) for k in range(n)]
    for i in indices:
        for j in range(n):
            acc = Cyclotomic.zero(order)
            for k in range(n):
                acc = acc + rows[i][k] * rows[k][j]
            expect = lam if j == i else 0
            if not (acc.is_rational and acc.as_rational() == expect):
                raise ConsistencyError("label is not self-conjugate",
                                       witness=(data.labels[i], j))


def mirror_extension(m: int, affine_ext: ExtensionSpec) -> ExtensionSpec:
    """Mirror an extension of sl2 level m+1 to the minimal model m.

    Every affine summand s must occur in the vacuum-sector branching
    gko_decomposition(m, 0, 0); it is replaced by the paired Kac label
    (1, s+1).  The recipe transfers the contragredient; charge
    conjugation is asserted to fix the touched labels first, so the map
    is the identity on them.
    """
    if affine_ext.base != ("sl2", m + 1):
        raise UsageError(f"extension base {affine_ext.base} is not sl2 level {m + 1}")
    rule = gko_decomposition(m, 0, 0)
    pair_map = {s: kac for kac, s in rule.pairs}
    summands = []
    for (j, mult) in affine_ext.summands:
        if j not in pair_map:
            raise UsageError(
                f"summand j={j} does not occur in the vacuum-sector branching "
                f"of m={m} (even labels 0..{m + 1} only)")
        summands.append((pair_map[j], mult))
    data = minimal_modular_data(m)
    touched = [data.labels.index(lab) for lab, _ in summands]
    _assert_self_conjugate(data, touched)
    return ExtensionSpec(
        base=("minimal", m),
        summands=tuple(summands),
        name=f"mirror({affine_ext.name or 'sl2 ext'}, m={m})",
        unitary="unknown",
    )


def conformal_embedding_check(k: int, target: dict) -> dict:
    """Certify an embedding of sl2 level k into a level-1 simple target.

    target needs keys name, dim, dual_coxeter.  Checks the exact central
    charge equality 3k/(k+2) = dim/(1 + h_vee) and the weight-one count:
    3 (the sl2 adjoint) plus (j+1) over catalog summands of weight one
    must equal dim.
    """
    c_sl2 = sl2_central_charge(k)
    c_target = Fraction(target["dim"], 1 + target["dual_coxeter"])
    c_ok = c_sl2 == c_target
    # the embedding VOA is the catalog entry carrying weight-one currents
    summands = [0]
    for ext, _, _ in catalog_extensions(("sl2", k)):
        cand = [lab for lab, _ in ext.summands]
        if any(j > 0 and sl2_weight(k, j) == 1 for j in cand):
            summands = cand
            break
    dim_count = 3 + sum(j + 1 for j in summands if j > 0 and sl2_weight(k, j) == 1)
    dim_ok = dim_count == target["dim"]
    return {
        "passed": c_ok and dim_ok,
        "central_charge": {"sl2": c_sl2, "target": c_target, "ok": c_ok},
        "weight_one": {"count": dim_count, "target": target["dim"], "ok": dim_ok},
    }


# ---------------------------------------------------------------------------
# catalog


def _vector(index_map, terms) -> tuple[int, ...]:
    out = [0] * len(index_map)
    for lab in terms:
        out[index_map[lab]] += 1
    return tuple(out)


def _sl2_d_rows(k: int):
    half = k // 2
    rows = [[0, k] if j == 0 else [j, k - j] for j in range(0, half, 2)]
    return rows + [[half], [half]]


def catalog_extensions(spec: tuple):
    """Every nontrivial extension constructed for the given theory, as
    (ExtensionSpec, ExtensionDecomposition, NamedVOA) triples with full
    irreducible-module decomposition rows."""
    family, param = spec
    out = []
    if family == "sl2":
        k = param
        index_map = {j: j for j in range(k + 1)}
        if k > 0 and k % 4 == 0:
            rows = [_vector(index_map, r) for r in _sl2_d_rows(k)]
            ext = ExtensionSpec(("sl2", k), ((0, 1), (k, 1)),
                                name=f"sl2 simple-current k={k}", unitary=True)
            out.append((ext, ExtensionDecomposition(tuple(rows)),
                        NamedVOA("sl2-simple-current", k)))
        if k == 10:
            blocks = [[0, 6], [3, 7], [4, 10]]
            rows = [_vector(index_map, b) for b in blocks]
            ext = ExtensionSpec(("sl2", 10), ((0, 1), (6, 1)),
                                name="sl2 conformal embedding k=10", unitary=True)
            out.append((ext, ExtensionDecomposition(tuple(rows)), NamedVOA("sl2-E6", 10)))
        if k == 28:
            blocks = [[0, 10, 18, 28], [6, 12, 16, 22]]
            rows = [_vector(index_map, b) for b in blocks]
            ext = ExtensionSpec(("sl2", 28),
                                ((0, 1), (10, 1), (18, 1), (28, 1)),
                                name="sl2 conformal embedding k=28", unitary=True)
            out.append((ext, ExtensionDecomposition(tuple(rows)), NamedVOA("sl2-E8", 28)))
        return out
    if family != "minimal":
        raise UsageError(f"no catalog for theory {family}")

    m = param
    labels = minimal_labels(m)
    index_map = {lab: t for t, lab in enumerate(labels)}

    def can(r, s):
        return kac_canonical(m, r, s)

    if m >= 3 and m % 4 in (0, 3):
        rows = []
        if m % 4 == 3:
            # D on the s side (level m+1, divisible by 4)
            level = m + 1
            for r in range(1, (m + 1) // 2 + 1):
                for j in range(0, level // 2, 2):
                    rows.append(_vector(index_map, [can(r, j + 1), can(r, level + 1 - j)]))
                fixed = _vector(index_map, [can(r, level // 2 + 1)])
                rows.extend([fixed, fixed])
        else:
            # D on the r side (level m, divisible by 4)
            level = m
            for s in range(1, (m + 2) // 2 + 1):
                for j in range(0, level // 2, 2):
                    rows.append(_vector(index_map, [can(j + 1, s), can(level + 1 - j, s)]))
                fixed = _vector(index_map, [can(level // 2 + 1, s)])
                rows.extend([fixed, fixed])
        vac_row = max(range(len(rows)), key=lambda t: rows[t][0])
        rows.insert(0, rows.pop(vac_row))
        ext = ExtensionSpec(("minimal", m),
                            ((can(1, 1), 1), (can(1, m + 2), 1)),
                            name=f"minimal D-type m={m}", unitary=True)
        out.append((ext, ExtensionDecomposition(tuple(rows)), NamedVOA("minimal-D", m)))

    e_blocks = {"E6": [[1, 7], [4, 8], [5, 11]],
                "E8": [[1, 11, 19, 29], [7, 13, 17, 23]]}
    e_cases = {10: ("E6", "r", "minimal-E6-coset", True),
               9: ("E6", "s", "minimal-E6-mirror", "unknown"),
               28: ("E8", "r", "minimal-E8-coset", True),
               27: ("E8", "s", "minimal-E8-mirror", "unknown")}
    if m in e_cases:
        ename, side, tag, unitary = e_cases[m]
        blocks = e_blocks[ename]
        rows = []
        if side == "r":
            for s in range(1, (m + 2) // 2 + 1):
                for b in blocks:
                    rows.append(_vector(index_map, [can(r, s) for r in b]))
        else:
            for r in range(1, (m + 1) // 2 + 1):
                for b in blocks:
                    rows.append(_vector(index_map, [can(r, s) for s in b]))
        vac_row = max(range(len(rows)), key=lambda t: rows[t][0])
        rows.insert(0, rows.pop(vac_row))
        if side == "r":
            summands = tuple((can(r, 1), 1) for r in blocks[0])
        else:
            summands = tuple((can(1, s), 1) for s in blocks[0])
        ext = ExtensionSpec(("minimal", m), summands,
                            name=f"minimal {ename} ({'coset' if unitary is True else 'mirror'}) m={m}",
                            unitary=unitary)
        out.append((ext, ExtensionDecomposition(tuple(rows)), NamedVOA(tag, m)))
    return out


# ---------------------------------------------------------------------------
# classification decision procedures


def solve_minimal_index(c: Fraction) -> Optional[int]:
    """Integer m with c_m = c, if any."""
    c = Fraction(c)
    if c >= 1:
        return None
    k = 6 / (1 - c)
    if k.denominator != 1:
        return None
    disc = 1 + 4 * int(k)
    root = math.isqrt(disc)
    if root * root != disc or (root - 5) % 2 != 0:
        return None
    m = (root - 5) // 2
    if m < 0 or minimal_central_charge(m) != c:
        return None
    return m


def classify_preunitary(c: Fraction, summands) -> Union[NamedVOA, Rejection]:
    """Decide which classified VOA a preunitary extension with central
    charge c < 1 and the given Virasoro summand multiset can be."""
    c = Fraction(c)
    if c >= 1:
        raise UsageError(f"classification requires c < 1, got {c}")
    m = solve_minimal_index(c)
    if m is None:
        return Rejection(f"{c} is not the central charge of any minimal model")
    want = []
    for lab in summands:
        if not (1 <= lab.r <= m + 1 and 1 <= lab.s <= m + 2):
            return Rejection(
                f"summand ({lab.r},{lab.s}) is outside the Kac table at m={m}")
        can = kac_canonical(m, lab.r, lab.s)
        want.append((can.r, can.s))
    want.sort()
    if want == [(1, 1)]:
        return NamedVOA("minimal-diagonal", m)
    for ext, _, named in catalog_extensions(("minimal", m)):
        have = sorted((lab.r, lab.s) for lab, mult in ext.summands for _ in range(mult))
        if have == want:
            return named
    return Rejection(
        f"summand multiset {want} does not match any classified extension at m={m}")


def classify_sl2_extension(k: int, summands) -> Union[NamedVOA, Rejection]:
    """Decide which classified VOA an extension of sl2 level k can be."""
    want = sorted(summands)
    if want == [0]:
        return NamedVOA("sl2-diagonal", k)
    for ext, _, named in catalog_extensions(("sl2", k)):
        have = sorted(lab for lab, mult in ext.summands for _ in range(mult))
        if have == want:
            return named
    return Rejection(
        f"summand multiset {want} does not match any classified extension at k={k}")
