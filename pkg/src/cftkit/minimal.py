"""Virasoro minimal models: Kac table, modular data, characters.

Model index m >= 1 corresponds to (p, p') = (m+2, m+3).  Labels are Kac
pairs (r, s) with 1 <= r <= m+1, 1 <= s <= m+2, modulo the reflection
(r, s) ~ (p-r, p'-s); the canonical representative has the smaller r
(tie-break: smaller s).  The unnormalized S matrix entry is

    (-1)^(r s' + s r') * two_i_sin(p' r r', p) * two_i_sin(p s s', p')

with scale lambda = 2 p p'; the sign convention is pinned by the modular
relations and Verlinde nonnegativity, both checked in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, UsageError
from .exact import zeta_combination
from .qseries import PuiseuxSeries, euler_phi_inverse, series_mul
from .rcft import ModularData

# above this size the S matrix is served lazily, row by row
_LAZY_THRESHOLD = 13


@dataclass(frozen=True)
class KacLabel:
    """Canonical Kac-table label of model m."""

    m: int
    r: int
    s: int

    def __post_init__(self):
        if not (1 <= self.r <= self.m + 1 and 1 <= self.s <= self.m + 2):
            raise UsageError(
                f"Kac label ({self.r},{self.s}) out of range for m={self.m}")

    def __repr__(self):
        return f"({self.r},{self.s})@m{self.m}"


def kac_canonical(m: int, r: int, s: int) -> KacLabel:
    """Canonical representative of (r, s) under (r,s) ~ (m+2-r, m+3-s)."""
    p, pp = m + 2, m + 3
    if not (1 <= r <= m + 1 and 1 <= s <= m + 2):
        raise UsageError(f"Kac label ({r},{s}) out of range for m={m}")
    r2, s2 = p - r, pp - s
    if (r2, s2) < (r, s):
        r, s = r2, s2
    return KacLabel(m, r, s)


def minimal_central_charge(m: int) -> Fraction:
    if m < 0:
        raise UsageError(f"model index must be >= 0, got {m}")
    return 1 - Fraction(6, (m + 2) * (m + 3))


def minimal_weight(m: int, r: int, s: int) -> Fraction:
    if not (1 <= r <= m + 1 and 1 <= s <= m + 2):
        raise UsageError(f"Kac label ({r},{s}) out of range for m={m}")
    p, pp = m + 2, m + 3
    return Fraction((r * pp - s * p) ** 2 - 1, 4 * p * pp)


def minimal_labels(m: int) -> list[KacLabel]:
    """Canonical labels, vacuum (1,1) first, ordered by (r, s)."""
    if m < 1:
        raise UsageError(f"model index must be >= 1, got {m}")
    out = []
    for r in range(1, m + 2):
        for s in range(1, m + 3):
            if kac_canonical(m, r, s) == KacLabel(m, r, s):
                out.append(KacLabel(m, r, s))
    expected = (m + 1) * (m + 2) // 2
    if len(out) != expected:
        raise ConsistencyError("Kac label count mismatch",
                               witness=(m, len(out), expected))
    return out


@dataclass(frozen=True)
class MinimalModel:
    m: int
    p: int
    p_prime: int
    labels: tuple[KacLabel, ...]


def minimal_model(m: int) -> MinimalModel:
    return MinimalModel(m, m + 2, m + 3, tuple(minimal_labels(m)))


def _s_entry(m: int, a: KacLabel, b: KacLabel, order: int):
    # (zeta^e1 - zeta^-e1)(zeta^e2 - zeta^-e2) expanded as four terms of
    # Q(zeta_2pp'), where e1, e2 are the embedded two_i_sin exponents
    return zeta_combination(_s_monomials(m, a, b), order)


def _s_monomials(m: int, a: KacLabel, b: KacLabel) -> tuple:
    p, pp = m + 2, m + 3
    sign = -1 if ((a.r * b.s + a.s * b.r) % 2) else 1
    e1 = pp * (pp * a.r * b.r)
    e2 = p * (p * a.s * b.s)
    return ((e1 + e2, sign), (e1 - e2, -sign), (-e1 + e2, -sign), (-e1 - e2, sign))


def minimal_modular_data(m: int) -> ModularData:
    """Modular data for the minimal model L(c_m, 0)."""
    labels = minimal_labels(m)
    p, pp = m + 2, m + 3
    order = 2 * p * pp
    weights = [minimal_weight(m, lab.r, lab.s) for lab in labels]

    def monomials(i: int, j: int, _labels=tuple(labels)) -> tuple:
        return _s_monomials(m, _labels[i], _labels[j])

    common = dict(
        s_monomials=monomials,
        theory_id=("minimal", m),
        labels=labels,
        central_charge=minimal_central_charge(m),
        weights=weights,
        s_scale=Fraction(2 * p * pp),
        s_order=order,
    )
    if m <= _LAZY_THRESHOLD:
        s = [[_s_entry(m, a, b, order) for b in labels] for a in labels]
        return ModularData(s_matrix=s, **common)

    def row_fn(i: int, _labels=tuple(labels)) -> tuple:
        a = _labels[i]
        return tuple(_s_entry(m, a, b, order) for b in _labels)

    return ModularData(s_row_fn=row_fn, **common)


def minimal_character(m: int, label: KacLabel, order: int) -> PuiseuxSeries:
    """Character of L(c_m, h_{r,s}) as an alternating lattice sum over the
    partition series, truncated to the given order.

    Relative numerator exponents are a(n) = pp'n^2 + n(rp'-sp) and
    b(n) = pp'n^2 + n(rp'+sp) + rs over all integers n; the result must
    have nonnegative coefficients with leading coefficient 1.
    """
    if order < 1:
        raise UsageError(f"order must be >= 1, got {order}")
    if kac_canonical(m, label.r, label.s) != label:
        raise UsageError(f"label {label} is not canonical")
    p, pp = m + 2, m + 3
    r, s = label.r, label.s
    numer = [0] * order
    n = 0
    while True:
        hit = False
        for nn in ((n, -n) if n else (0,)):
            base = p * pp * nn * nn
            a = base + nn * (r * pp - s * p)
            b = base + nn * (r * pp + s * p) + r * s
            if 0 <= a < order:
                numer[a] += 1
                hit = True
            if 0 <= b < order:
                numer[b] -= 1
                hit = True
        if n and not hit and p * pp * n * n - n * (r * pp + s * p) >= order:
            break
        n += 1
    lead = minimal_weight(m, r, s) - minimal_central_charge(m) / 24
    raw = PuiseuxSeries(lead, numer)
    result = series_mul(raw, euler_phi_inverse(order).scale_exponent_shift(0))
    result = PuiseuxSeries(lead, result.coeffs)
    for d, c in enumerate(result.coeffs):
        if c < 0:
            raise ConsistencyError("negative character coefficient",
                                   witness=(m, (r, s), d, c))
    if result.coeffs[0] != 1:
        raise ConsistencyError("character leading coefficient is not 1",
                               witness=(m, (r, s), result.coeffs[0]))
    return result
