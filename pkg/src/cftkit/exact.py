"""Exact arithmetic kernel: rationals and cyclotomic field elements.

Rationals are ``fractions.Fraction`` throughout (arbitrary precision,
always in lowest terms).  Elements of Q(zeta_N) are held in the power
basis ``zeta^0 .. zeta^(phi(N)-1)`` of Q[x]/Phi_N(x), where Phi_N is the
N-th cyclotomic polynomial; reduction mod Phi_N is canonical, so equality
is coordinate-wise.  Internally a common-denominator integer vector is
used so that the hot multiplication path is integer convolution.

Numeric evaluation is rigorous: it returns a midpoint plus an error
radius computed with interval arithmetic (mpmath's ``iv`` context), never
a bare float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import UsageError

Rational = Fraction

# numpy fast path is used only when every intermediate provably fits int64
_INT64_SAFE = 1 << 62


def euler_phi(n: int) -> int:
    """Euler totient of a positive integer."""
    if n < 1:
        raise UsageError(f"euler_phi requires n >= 1, got {n}")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (coefficient lists, low to high)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        q, r = divmod(num[i + len(den) - 1], den[-1])
        if r:
            raise ArithmeticError("non-exact polynomial division")
        out[i] = q
        for j, d in enumerate(den):
            num[i + j] -= q * d
    if any(num):
        raise ArithmeticError("non-exact polynomial division (remainder)")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, low degree first, computed by dividing
    x^n - 1 by Phi_d over all proper divisors d of n."""
    if n < 1:
        raise UsageError(f"cyclotomic_polynomial requires n >= 1, got {n}")
    if n == 1:
        return (-1, 1)
    poly = [0] * (n + 1)
    poly[0], poly[n] = -1, 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divexact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def _reduction_data(n: int):
    """Per-order reduction helpers.

    Returns (phi, rows) where rows[d] for d in range(max_deg) is the
    integer coordinate vector of x^(phi + d) mod Phi_n, as a numpy int64
    matrix of shape (n + phi, phi).  Degrees up to 2*phi - 2 cover any
    single product; degrees up to n - 1 cover cyclo_reduce input.
    """
    phi = euler_phi(n)
    cp = cyclotomic_polynomial(n)
    # x^phi == -(cp[0] + cp[1] x + ... + cp[phi-1] x^(phi-1))  (cp monic)
    top = [-c for c in cp[:phi]]
    max_deg = max(2 * phi - 1, n)
    rows: list[list[int]] = []
    prev = top
    rows.append(list(prev))
    for _ in range(phi + 1, max_deg + 1):
        nxt = [0] + prev[:-1]
        lead = prev[-1]
        if lead:
            for i in range(phi):
                nxt[i] += lead * top[i]
        rows.append(nxt)
        prev = nxt
    arr = np.array(rows, dtype=object)
    maxabs = max(1, max(abs(int(v)) for v in arr.flat))
    if maxabs < _INT64_SAFE:
        arr64 = arr.astype(np.int64)
    else:  # pragma: no cover - enormous orders only
        arr64 = None
    return phi, arr, arr64, maxabs


def _reduce_int_poly(coeffs: Sequence[int], n: int) -> list[int]:
    """Reduce an integer coefficient list (any length) mod Phi_n."""
    phi, rows_obj, rows64, rowmax = _reduction_data(n)
    out = list(coeffs[:phi]) + [0] * max(0, phi - len(coeffs))
    high = list(coeffs[phi:])
    if not high:
        return out
    hmax = max(abs(c) for c in high) if high else 0
    if rows64 is not None and hmax * rowmax * len(high) < _INT64_SAFE and hmax < _INT64_SAFE:
        acc = np.asarray(high, dtype=np.int64) @ rows64[: len(high)]
        return [int(o) + int(a) for o, a in zip(out, acc)]
    for d, c in enumerate(high):
        if c:
            row = rows_obj[d]
            for i in range(phi):
                out[i] += c * int(row[i])
    return out


def _conv_int(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Integer convolution, numpy when provably overflow-free."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return []
    ma = max(abs(c) for c in a)
    mb = max(abs(c) for c in b)
    if ma and mb and ma * mb * min(la, lb) < _INT64_SAFE and ma < _INT64_SAFE and mb < _INT64_SAFE:
        return [int(v) for v in np.convolve(np.asarray(a, dtype=np.int64),
                                            np.asarray(b, dtype=np.int64))]
    out = [0] * (la + lb - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                if cb:
                    out[i + j] += ca * cb
    return out


def _normalize(nums: Iterable[int], den: int) -> tuple[tuple[int, ...], int]:
    nums = tuple(int(v) for v in nums)
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        nums = tuple(-v for v in nums)
        den = -den
    g = den
    for v in nums:
        g = math.gcd(g, v)
        if g == 1:
            break
    if g > 1:
        nums = tuple(v // g for v in nums)
        den //= g
    if not any(nums):
        den = 1
    return nums, den


class Cyclotomic:
    """An element of Q(zeta_N) in canonical reduced power-basis coordinates.

    Immutable; coordinates are rationals stored as an integer numerator
    vector of length phi(N) over a single positive denominator.
    """

    __slots__ = ("order", "_num", "_den")

    def __init__(self, order: int, num: tuple[int, ...], den: int, _raw: bool = False):
        if _raw:
            self.order = order
            self._num = num
            self._den = den
            return
        phi = euler_phi(order)
        if len(num) != phi:
            raise UsageError(f"need {phi} coordinates for order {order}, got {len(num)}")
        self._num, self._den = _normalize(num, den)
        self.order = order

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(order: int = 1) -> "Cyclotomic":
        return Cyclotomic(order, (0,) * euler_phi(order), 1, _raw=True)

    @staticmethod
    def from_rational(x, order: int = 1) -> "Cyclotomic":
        x = Fraction(x)
        phi = euler_phi(order)
        num = (x.numerator,) + (0,) * (phi - 1)
        return Cyclotomic(order, num, x.denominator, _raw=True)

    @staticmethod
    def zeta(order: int, power: int = 1) -> "Cyclotomic":
        """zeta_order ** power, reduced to canonical form."""
        power %= order
        coeffs = [0] * order
        coeffs[power] = 1
        return cyclo_reduce(coeffs, order)

    # -- basic structure ----------------------------------------------

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v, self._den) for v in self._num)

    @property
    def is_zero(self) -> bool:
        return not any(self._num)

    @property
    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise UsageError(f"{self!r} is not rational")
        return Fraction(self._num[0] if self._num else 0, self._den)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.from_rational(other, self.order)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        if self.order != other.order:
            a, b = _lift_pair(self, other)
            return a == b
        return self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((self.order, self._num, self._den))

    def __repr__(self):
        terms = []
        for i, v in enumerate(self._num):
            if v:
                c = f"{v}" if self._den == 1 else f"({v}/{self._den})"
                terms.append(c if i == 0 else f"{c}*z{self.order}^{i}")
        return "Cyclo(" + (" + ".join(terms) if terms else "0") + ")"

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other, self.order)
        a, b = _lift_pair(self, other)
        num = tuple(x * b._den + y * a._den for x, y in zip(a._num, b._num))
        return Cyclotomic(a.order, num, a._den * b._den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, tuple(-v for v in self._num), self._den, _raw=True)

    def __sub__(self, other):
        return self + (-_coerce(other, self.order))

    def __rsub__(self, other):
        return _coerce(other, self.order) + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return Cyclotomic(self.order,
                              tuple(v * other.numerator for v in self._num),
                              self._den * other.denominator)
        a, b = _lift_pair(self, other)
        return _mul_same_order(a, b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * Fraction(other.denominator, other.numerator)
        return self * cyclo_inv(_coerce(other, self.order))

    def lift(self, order: int) -> "Cyclotomic":
        """Embed into Q(zeta_order); order must be a multiple of self.order."""
        return cyclo_embed(self, order)


def _coerce(x, order: int) -> Cyclotomic:
    if isinstance(x, Cyclotomic):
        return x
    if isinstance(x, (int, Fraction)):
        return Cyclotomic.from_rational(x, order)
    raise TypeError(f"cannot coerce {type(x).__name__} to Cyclotomic")


def _lift_pair(a: Cyclotomic, b: Cyclotomic) -> tuple[Cyclotomic, Cyclotomic]:
    if a.order == b.order:
        return a, b
    m = math.lcm(a.order, b.order)
    return cyclo_embed(a, m), cyclo_embed(b, m)


def _mul_same_order(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    num = _reduce_int_poly(_conv_int(a._num, b._num), a.order)
    return Cyclotomic(a.order, tuple(num), a._den * b._den)


def cyclo_reduce(poly_coeffs: Sequence, n: int) -> Cyclotomic:
    """Canonical representative of sum(c_a * zeta_n^a) in Q(zeta_n).

    ``poly_coeffs`` is indexed by zeta-powers 0..len-1 (rationals or ints);
    exponents at or above n are accepted and folded with zeta^n = 1.
    """
    if n < 1:
        raise UsageError(f"order must be >= 1, got {n}")
    folded: dict[int, Fraction] = {}
    for a, c in enumerate(poly_coeffs):
        c = Fraction(c)
        if c:
            folded[a % n] = folded.get(a % n, Fraction(0)) + c
    if not folded:
        return Cyclotomic.zero(n)
    den = math.lcm(*(c.denominator for c in folded.values()))
    ints = [0] * n
    for a, c in folded.items():
        ints[a] = int(c * den)
    num = _reduce_int_poly(ints, n)
    return Cyclotomic(n, tuple(num), den)


def zeta_combination(terms: Iterable[tuple[int, int]], n: int) -> Cyclotomic:
    """sum of c * zeta_n^e over (e, c) pairs with integer c, reduced.

    Fast path for sparse combinations at large orders: each term costs
    one reduction-row add instead of a full polynomial reduction.
    """
    if n < 1:
        raise UsageError(f"order must be >= 1, got {n}")
    phi, rows_obj, rows64, _ = _reduction_data(n)
    if rows64 is not None:
        out = np.zeros(phi, dtype=np.int64)
        for e, c in terms:
            if not c:
                continue
            e %= n
            if e < phi:
                out[e] += c
            else:
                out += c * rows64[e - phi]
        return Cyclotomic(n, tuple(int(v) for v in out), 1)
    out_list = [0] * phi
    for e, c in terms:
        if not c:
            continue
        e %= n
        if e < phi:
            out_list[e] += c
        else:
            row = rows_obj[e - phi]
            for i in range(phi):
                out_list[i] += c * int(row[i])
    return Cyclotomic(n, tuple(out_list), 1)


def reduce_counts_batch(counts, n: int):
    """Reduce rows of monomial-count vectors mod Phi_n.

    Row r of counts holds integer multiplicities: counts[r][e] copies of
    zeta_n^e for 0 <= e < n.  Returns the (rows, phi(n)) integer
    coordinate array in the power basis, int64 when provably
    overflow-free and exact object dtype otherwise.
    """
    phi, rows_obj, rows64, rowmax = _reduction_data(n)
    counts = np.asarray(counts, dtype=np.int64)
    low = counts[:, :phi]
    high = counts[:, phi:]
    k = high.shape[1]
    if k == 0:
        return low.copy()
    hmax = int(np.abs(high).max())
    if rows64 is not None and hmax * rowmax * k < _INT64_SAFE:
        return low + high @ rows64[:k]
    return low.astype(object) + high.astype(object) @ rows_obj[:k]


def cyclo_embed(a: Cyclotomic, m: int) -> Cyclotomic:
    """Embed Q(zeta_N) into Q(zeta_M) via zeta_N -> zeta_M^(M/N)."""
    if m == a.order:
        return a
    if m % a.order != 0:
        raise UsageError(f"cannot embed order {a.order} into order {m}")
    step = m // a.order
    coeffs = [0] * m
    for i, v in enumerate(a._num):
        coeffs[i * step] = v
    num = _reduce_int_poly(coeffs, m)
    return Cyclotomic(m, tuple(num), a._den)


def cyclo_mul(a: Cyclotomic, b: Cyclotomic) -> Cyclotomic:
    """Canonical product; both operands must share one order."""
    if a.order != b.order:
        raise UsageError(f"order mismatch: {a.order} != {b.order}; lift via cyclo_embed")
    return _mul_same_order(a, b)


def cyclo_inv(a: Cyclotomic) -> Cyclotomic:
    """Multiplicative inverse, by extended Euclid in Q[x] against Phi_N."""
    if a.is_zero:
        raise ZeroDivisionError("cyclo_inv of zero")
    if a.is_rational:
        x = a.as_rational()
        return Cyclotomic.from_rational(1 / x, a.order)
    n = a.order
    phi_poly = [Fraction(c) for c in cyclotomic_polynomial(n)]
    # extended Euclid: r0 = Phi_N, r1 = a;  maintain r_i = t_i * a (mod Phi)
    r0, r1 = phi_poly, [Fraction(v, a._den) for v in a._num]
    t0, t1 = [Fraction(0)], [Fraction(1)]
    while True:
        r1 = _poly_trim(r1)
        if len(r1) == 1:
            break
        q, r = _poly_divmod(r0, r1)
        t_new = _poly_sub(t0, _poly_mul(q, t1))
        r0, r1, t0, t1 = r1, r, t1, t_new
    if not r1 or r1[0] == 0:
        raise ZeroDivisionError("element is a zero divisor (non-canonical input?)")
    inv_poly = [c / r1[0] for c in t1]
    den = math.lcm(*(c.denominator for c in inv_poly)) if inv_poly else 1
    ints = [int(c * den) for c in inv_poly]
    num = _reduce_int_poly(ints, n)
    return Cyclotomic(n, tuple(num), den)


def _poly_trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def _poly_divmod(num, den):
    num = list(num)
    den = _poly_trim(list(den))
    q = [Fraction(0)] * max(1, len(num) - len(den) + 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] / den[-1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return _poly_trim(q), _poly_trim(num[: len(den) - 1] or [Fraction(0)])


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


def two_i_sin(a: int, n: int) -> Cyclotomic:
    """Exact carrier of 2i*sin(pi*a/n): zeta_{2n}^a - zeta_{2n}^(-a)."""
    if n < 1:
        raise UsageError(f"two_i_sin requires n >= 1, got {n}")
    m = 2 * n
    coeffs = [0] * m
    coeffs[a % m] += 1
    coeffs[(-a) % m] -= 1
    return cyclo_reduce(coeffs, m)


@dataclass(frozen=True)
class ComplexBall:
    """Rigorous complex enclosure: exact-dyadic midpoint plus error radius."""

    real_mid: object  # mpmath.mpf
    imag_mid: object  # mpmath.mpf
    radius: object    # mpmath.mpf, upper bound on |true - mid|

    @property
    def midpoint(self) -> complex:
        return complex(float(self.real_mid), float(self.imag_mid))

    def contains(self, other: "ComplexBall") -> bool:
        """True when the two balls intersect; two correct enclosures of
        the same value always do, so a False result refutes soundness."""
        dr = self.real_mid - other.real_mid
        di = self.imag_mid - other.imag_mid
        dist = mpmath.sqrt(dr * dr + di * di)
        return dist <= mpmath.mpf(self.radius) + mpmath.mpf(other.radius)

    def upper_abs(self) -> Fraction:
        """Exact rational upper bound on |value|."""
        mag = mpmath.sqrt(self.real_mid ** 2 + self.imag_mid ** 2)
        return _mpf_to_fraction_up(mag + self.radius)


def _mpf_to_fraction_up(x) -> Fraction:
    """Exact Fraction from an mpf, nudged up one ulp for safety."""
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man = -man if sign else man
    f = Fraction(man) * (Fraction(2) ** exp if exp >= 0 else Fraction(1, 2 ** -exp))
    return f + Fraction(1, 2 ** 48) * (abs(f) + 1)


def numeric_eval(a: Cyclotomic, precision_bits: int = 64) -> ComplexBall:
    """Interval evaluation of a cyclotomic number.

    The returned ball rigorously contains the true value; halving the
    radius is achieved by doubling the precision.
    """
    if precision_bits < 32:
        raise UsageError("precision_bits must be >= 32")
    iv = mpmath.iv
    old = iv.prec
    try:
        iv.prec = precision_bits
        n = a.order
        den = iv.mpf(a._den)
        re = iv.mpf(0)
        im = iv.mpf(0)
        two_pi = 2 * iv.pi
        for k, v in enumerate(a._num):
            if v:
                theta = two_pi * k / n
                re += v * iv.cos(theta)
                im += v * iv.sin(theta)
        re /= den
        im /= den
        # midpoint arithmetic at working precision, with an explicit slack
        # term covering its own rounding, so the ball stays rigorous
        with mpmath.workprec(precision_bits + 16):
            mid_r = (mpmath.mpf(re.a) + mpmath.mpf(re.b)) / 2
            mid_i = (mpmath.mpf(im.a) + mpmath.mpf(im.b)) / 2
            rad = (mpmath.mpf(re.delta) / 2 + mpmath.mpf(im.delta) / 2
                   + (abs(mid_r) + abs(mid_i) + 1) * mpmath.mpf(2) ** (-precision_bits - 8))
            return ComplexBall(mid_r, mid_i, rad)
    finally:
        iv.prec = old
