"""Affine sl2 WZW data: modular data, characters, fusion, extensions.

Level-k labels are j = 0..k (twice the spin).  The unnormalized S matrix
carries 2i*sin(pi (i+1)(j+1)/(k+2)) exactly as a cyclotomic element; the
scale lambda = -2(k+2) absorbs the (2i)^2 so that S_un^2 = lambda C and
the normalized S = S_un / sqrt(lambda) is the familiar real matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, UsageError
from .exact import two_i_sin
from .qseries import LaurentPoly, PuiseuxSeries
from .rcft import ModularData


@dataclass(frozen=True)
class Sl2Label:
    """Irreducible level-k module label; j is twice the spin, 0 <= j <= k."""

    k: int
    j: int

    def __post_init__(self):
        if not (0 <= self.j <= self.k):
            raise UsageError(f"sl2 label j={self.j} out of range at level {self.k}")

    def __repr__(self):
        return f"(k={self.k}, j={self.j})"


@dataclass(frozen=True)
class Sl2ExtensionCatalogEntry:
    """A simple-current extension with its full irreducible module list.

    Each irreducible row is (tuple of j labels, sigma_twisted flag); the
    twisted flag marks the second module structure on the same space.
    """

    name: str
    k: int
    voa_modules: tuple[int, ...]
    irreducibles: tuple[tuple[tuple[int, ...], bool], ...]
    unitary: bool


def sl2_central_charge(k: int) -> Fraction:
    if k < 0:
        raise UsageError(f"level must be >= 0, got {k}")
    return Fraction(3 * k, k + 2)


def sl2_weight(k: int, j: int) -> Fraction:
    if not (0 <= j <= k):
        raise UsageError(f"j={j} out of range at level {k}")
    return Fraction(j * (j + 2), 4 * (k + 2))


def sl2_modular_data(k: int) -> ModularData:
    """Modular data for the level-k affine sl2 WZW model."""
    if k < 0:
        raise UsageError(f"level must be >= 0, got {k}")
    n = k + 2
    labels = [Sl2Label(k, j) for j in range(k + 1)]
    weights = [sl2_weight(k, j) for j in range(k + 1)]
    s = [[two_i_sin((i + 1) * (j + 1), n) for j in range(k + 1)]
         for i in range(k + 1)]

    def monomials(i: int, j: int) -> tuple:
        a = (i + 1) * (j + 1)
        return ((a, 1), (-a, -1))

    return ModularData(
        s_monomials=monomials,
        theory_id=("sl2", k),
        labels=labels,
        central_charge=sl2_central_charge(k),
        weights=weights,
        s_scale=Fraction(-2 * n),
        s_order=2 * n,
        s_matrix=s,
    )


def _theta_numerator(a: int, n: int, order: int) -> PuiseuxSeries:
    """F_{a,n} = sum_m q^(n m^2 + a m) (z^(2nm+a) - z^(-(2nm+a))),
    with leading exponent a^2/(4n); truncated to the given order."""
    coeffs: list[LaurentPoly] = [LaurentPoly() for _ in range(order)]
    m = 0
    while True:
        hit = False
        for mm in ((m, -m) if m else (0,)):
            d = n * mm * mm + a * mm
            if 0 <= d < order:
                e = 2 * n * mm + a
                coeffs[d] = coeffs[d] + LaurentPoly({e: 1, -e: -1})
                hit = True
        if m and not hit and n * m * m - abs(a) * m >= order:
            break
        m += 1
    return PuiseuxSeries(Fraction(a * a, 4 * n), coeffs)


def sl2_character(k: int, j: int, order: int) -> PuiseuxSeries:
    """Two-variable character of L_sl2(k, j) as a Weyl-Kac theta quotient.

    Coefficient at relative q-degree d is the symmetric Laurent polynomial
    whose z-exponent records twice the Cartan eigenvalue at level h_j + d.
    The quotient is computed order by order with exact Laurent division;
    divisibility holds identically, so any remainder aborts loudly.
    """
    if order < 1:
        raise UsageError(f"order must be >= 1, got {order}")
    if not (0 <= j <= k):
        raise UsageError(f"j={j} out of range at level {k}")
    num = _theta_numerator(j + 1, k + 2, order)
    den = _theta_numerator(1, 2, order)
    d0 = den.coeffs[0]
    out: list[LaurentPoly] = []
    for d in range(order):
        acc = num.coeffs[d]
        for e in range(d):
            ce = out[e]
            if not ce.is_zero:
                acc = acc - ce * den.coeffs[d - e]
        out.append(acc.divexact(d0))
    lead = num.leading_exponent - den.leading_exponent
    expected = sl2_weight(k, j) - sl2_central_charge(k) / 24
    if lead != expected:
        raise ConsistencyError("character leading exponent mismatch",
                               witness=(k, j, str(lead), str(expected)))
    return PuiseuxSeries(lead, out)


def sl2_fusion_closed_form(k: int, i: int, j: int) -> set[int]:
    """Level-k fusion support: l in [|i-j|, min(i+j, 2k-i-j)], l = i+j mod 2."""
    if not (0 <= i <= k and 0 <= j <= k):
        raise UsageError(f"labels ({i},{j}) out of range at level {k}")
    lo = abs(i - j)
    hi = min(i + j, 2 * k - i - j)
    return {l for l in range(lo, hi + 1) if (l - i - j) % 2 == 0}


def sl2_simple_current_extension(k: int) -> Sl2ExtensionCatalogEntry:
    """The simple-current extension V(k,0) + V(k,k), defined for k = 4n.

    Its irreducibles are the paired modules {j, k-j} for even j below
    k/2, plus the fixed point j = k/2 with its two module structures
    (plain and sigma-twisted).
    """
    if k <= 0 or k % 4 != 0:
        h = Fraction(k, 4)
        raise UsageError(
            f"simple-current extension needs level divisible by 4; "
            f"h_{k} = {h} is not a positive integer" if k > 0
            else f"level must be positive, got {k}")
    half = k // 2
    irr: list[tuple[tuple[int, ...], bool]] = []
    for j in range(0, half, 2):
        irr.append(((j, k - j), False))
    irr.append(((half,), False))
    irr.append(((half,), True))
    return Sl2ExtensionCatalogEntry(
        name=f"D(k={k})",
        k=k,
        voa_modules=(0, k),
        irreducibles=tuple(irr),
        unitary=True,
    )
