"""Truncated formal series for characters.

A character is a series in q with a rational leading exponent (h - c/24)
and integer steps; each coefficient is either an integer or a Laurent
polynomial in a formal variable z recording the Cartan grading.  All
coefficients are exact integers; two series may only be added when their
leading exponents differ by an integer (same "sector"), otherwise the
sum is not a single graded trace and the caller must keep them apart.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Union

from .errors import ConsistencyError, UsageError

DEFAULT_ORDER = 20


class LaurentPoly:
    """Integer Laurent polynomial in z, keyed by exponent."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[int, int] = ()):
        clean = {int(e): int(c) for e, c in dict(coeffs).items() if c}
        self.coeffs = clean

    @staticmethod
    def monomial(exp: int, c: int = 1) -> "LaurentPoly":
        return LaurentPoly({exp: c})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def degree_range(self) -> tuple[int, int]:
        if not self.coeffs:
            return (0, 0)
        return (min(self.coeffs), max(self.coeffs))

    def __getitem__(self, exp: int) -> int:
        return self.coeffs.get(exp, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly({0: other})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        other = _promote(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_promote(other))

    def __rsub__(self, other):
        return _promote(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, int):
            return LaurentPoly({e: c * other for e, c in self.coeffs.items()})
        out: dict[int, int] = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, 0) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def divexact(self, den: "LaurentPoly") -> "LaurentPoly":
        """Exact Laurent division; raises ConsistencyError on a remainder."""
        if den.is_zero:
            raise ZeroDivisionError("Laurent division by zero")
        if self.is_zero:
            return LaurentPoly()
        rem = dict(self.coeffs)
        dmax = max(den.coeffs)
        dlead = den.coeffs[dmax]
        out: dict[int, int] = {}
        while rem:
            rmax = max(rem)
            q, r = divmod(rem[rmax], dlead)
            if r:
                raise ConsistencyError(
                    "non-exact Laurent division", witness=(rmax, rem[rmax], dlead))
            e = rmax - dmax
            out[e] = out.get(e, 0) + q
            for de, dc in den.coeffs.items():
                k = e + de
                v = rem.get(k, 0) - q * dc
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
            if rem and max(rem) >= rmax:
                raise ConsistencyError("Laurent division does not terminate",
                                       witness=(rmax, dict(rem)))
        return LaurentPoly(out)

    def eval_one(self) -> int:
        """Value at z = 1 (total graded dimension)."""
        return sum(self.coeffs.values())

    def is_symmetric(self) -> bool:
        return all(self.coeffs.get(-e, 0) == c for e, c in self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "LaurentPoly(0)"
        terms = [f"{c}*z^{e}" for e, c in sorted(self.coeffs.items())]
        return "LaurentPoly(" + " + ".join(terms) + ")"


Coefficient = Union[int, LaurentPoly]


def _promote(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly({0: x})
    raise TypeError(f"cannot promote {type(x).__name__} to LaurentPoly")


def _cadd(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, int) and isinstance(b, int):
        return a + b
    return _promote(a) + _promote(b)


def _cmul(a: Coefficient, b: Coefficient) -> Coefficient:
    if isinstance(a, int) and isinstance(b, int):
        return a * b
    return _promote(a) * _promote(b)


def _czero(x: Coefficient) -> bool:
    return x == 0 if isinstance(x, int) else x.is_zero


class PuiseuxSeries:
    """Truncated series sum_d coeffs[d] * q^(leading_exponent + d)."""

    __slots__ = ("leading_exponent", "coeffs")

    def __init__(self, leading_exponent, coeffs):
        self.leading_exponent = Fraction(leading_exponent)
        self.coeffs = tuple(coeffs)
        for c in self.coeffs:
            if not isinstance(c, (int, LaurentPoly)):
                raise UsageError(f"bad coefficient type {type(c).__name__}")

    @property
    def order(self) -> int:
        return len(self.coeffs)

    @staticmethod
    def unit(order: int = DEFAULT_ORDER) -> "PuiseuxSeries":
        return PuiseuxSeries(0, (1,) + (0,) * (order - 1))

    def __getitem__(self, d: int) -> Coefficient:
        return self.coeffs[d]

    def coefficient_at(self, exponent) -> Coefficient:
        """Coefficient of q^exponent; zero off-sector or out of window."""
        d = Fraction(exponent) - self.leading_exponent
        if d.denominator != 1 or d < 0 or d >= self.order:
            return 0
        return self.coeffs[int(d)]

    def truncate(self, order: int) -> "PuiseuxSeries":
        if order > self.order:
            raise UsageError(f"cannot extend truncation {self.order} to {order}")
        return PuiseuxSeries(self.leading_exponent, self.coeffs[:order])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        a, b = self._aligned(other, strict=False)
        if a is None:
            return False
        sa, sb = a, b
        if len(sa.coeffs) != len(sb.coeffs) or sa.leading_exponent != sb.leading_exponent:
            return False
        return all(_promote(x) == _promote(y) for x, y in zip(sa.coeffs, sb.coeffs))

    def __hash__(self):
        return hash((self.leading_exponent, tuple(_promote(c) for c in self.coeffs)))

    def _aligned(self, other: "PuiseuxSeries", strict: bool = True):
        """Shift both series to a common leading exponent, common order."""
        diff = other.leading_exponent - self.leading_exponent
        if diff.denominator != 1:
            if strict:
                raise UsageError(
                    f"sector mismatch: leading exponents differ by {diff}, not an integer")
            return None, None
        le = min(self.leading_exponent, other.leading_exponent)
        pad_a = int(self.leading_exponent - le)
        pad_b = int(other.leading_exponent - le)
        order = min(self.order + pad_a, other.order + pad_b)
        ca = (0,) * pad_a + self.coeffs
        cb = (0,) * pad_b + other.coeffs
        a = PuiseuxSeries(le, (ca + (0,) * order)[:order])
        b = PuiseuxSeries(le, (cb + (0,) * order)[:order])
        return a, b

    def __add__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self
            other = PuiseuxSeries(0, (other,) + (0,) * (self.order - 1))
        a, b = self._aligned(other)
        return PuiseuxSeries(a.leading_exponent,
                             tuple(_cadd(x, y) for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return PuiseuxSeries(self.leading_exponent,
                             tuple(-c if isinstance(c, int) else -c for c in self.coeffs))

    def __sub__(self, other):
        if isinstance(other, int):
            other = PuiseuxSeries(0, (other,) + (0,) * (self.order - 1))
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, LaurentPoly)):
            return PuiseuxSeries(self.leading_exponent,
                                 tuple(_cmul(c, other) for c in self.coeffs))
        return series_mul(self, other)

    __rmul__ = __mul__

    def scale_exponent_shift(self, delta) -> "PuiseuxSeries":
        """Multiply by q^delta (shift the leading exponent)."""
        return PuiseuxSeries(self.leading_exponent + Fraction(delta), self.coeffs)

    def __repr__(self):
        head = ", ".join(repr(c) for c in self.coeffs[:6])
        tail = ", ..." if self.order > 6 else ""
        return f"PuiseuxSeries(q^{self.leading_exponent} * [{head}{tail}])"


def series_mul(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    """Cauchy product; truncation order is the minimum of the factors'."""
    order = min(a.order, b.order)
    out: list[Coefficient] = [0] * order
    for i in range(order):
        ca = a.coeffs[i]
        if _czero(ca):
            continue
        for j in range(order - i):
            cb = b.coeffs[j]
            if _czero(cb):
                continue
            out[i + j] = _cadd(out[i + j], _cmul(ca, cb))
    return PuiseuxSeries(a.leading_exponent + b.leading_exponent, out)


def _lead_inverse(c: Coefficient) -> Coefficient:
    if isinstance(c, int):
        if c in (1, -1):
            return c
        raise UsageError(f"leading coefficient {c} is not invertible (need +-1)")
    if len(c.coeffs) == 1:
        (e, v), = c.coeffs.items()
        if v in (1, -1):
            return LaurentPoly({-e: v})
    raise UsageError(f"leading coefficient {c!r} is not an invertible z-monomial")


def series_inv(a: PuiseuxSeries) -> PuiseuxSeries:
    """Multiplicative inverse to the same truncation order."""
    if a.order < 1:
        raise UsageError("cannot invert an empty series")
    c0 = a.coeffs[0]
    inv0 = _lead_inverse(c0)
    out: list[Coefficient] = [inv0] + [0] * (a.order - 1)
    for d in range(1, a.order):
        acc: Coefficient = 0
        for j in range(1, d + 1):
            if not _czero(a.coeffs[j]):
                acc = _cadd(acc, _cmul(a.coeffs[j], out[d - j]))
        if not _czero(acc):
            out[d] = _cmul(-1, _cmul(inv0, acc))
    return PuiseuxSeries(-a.leading_exponent, out)


def euler_product(order: int) -> PuiseuxSeries:
    """prod_{n>=1} (1 - q^n) truncated to the given order."""
    if order < 1:
        raise UsageError(f"order must be >= 1, got {order}")
    coeffs = [0] * order
    coeffs[0] = 1
    for n in range(1, order):
        # multiply in place by (1 - q^n)
        for d in range(order - 1, n - 1, -1):
            coeffs[d] -= coeffs[d - n]
    return PuiseuxSeries(0, coeffs)


def euler_phi_inverse(order: int) -> PuiseuxSeries:
    """Partition generating series sum p(n) q^n, by inverting the Euler product."""
    return series_inv(euler_product(order))
