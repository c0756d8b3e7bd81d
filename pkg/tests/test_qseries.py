"""Truncated Puiseux series and Laurent-coefficient arithmetic."""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cftkit.errors import ConsistencyError, UsageError
from cftkit.qseries import (
    LaurentPoly,
    PuiseuxSeries,
    euler_phi_inverse,
    euler_product,
    series_inv,
    series_mul,
)

sys.path.insert(0, str(Path(__file__).parent))
from oracles import partition_counts  # noqa: E402


def test_partition_series_matches_dp_oracle():
    order = 51
    series = euler_phi_inverse(order)
    assert series.leading_exponent == 0
    assert list(series.coeffs) == partition_counts(50)


def test_euler_product_pentagonal_numbers():
    # coefficients of prod (1 - q^n) are 0, +-1 at generalized pentagonal numbers
    series = euler_product(40)
    expected = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1, 22: 1, 26: 1,
                35: -1}
    for d in range(40):
        assert series.coeffs[d] == expected.get(d, 0), d


def _random_series(draw, unit=False):
    order = draw(st.integers(2, 8))
    lead = Fraction(draw(st.integers(-6, 6)), draw(st.integers(1, 8)))
    coeffs = [draw(st.integers(-4, 4)) for _ in range(order)]
    if unit:
        coeffs[0] = draw(st.sampled_from([1, -1]))
    return PuiseuxSeries(lead, coeffs)


@st.composite
def series_strategy(draw, unit=False):
    return _random_series(draw, unit)


@given(series_strategy(), series_strategy())
@settings(max_examples=80, deadline=None)
def test_series_mul_commutative(a, b):
    assert series_mul(a, b) == series_mul(b, a)


@given(series_strategy(), series_strategy(), series_strategy())
@settings(max_examples=60, deadline=None)
def test_series_mul_associative(a, b, c):
    left = series_mul(series_mul(a, b), c)
    right = series_mul(a, series_mul(b, c))
    assert left == right


@given(series_strategy(unit=True))
@settings(max_examples=100, deadline=None)
def test_series_inv_roundtrip(a):
    inv = series_inv(a)
    prod = series_mul(a, inv)
    assert prod.leading_exponent == 0
    assert prod.coeffs[0] == 1
    assert all(c == 0 or (hasattr(c, "is_zero") and c.is_zero)
               for c in prod.coeffs[1:])


def test_series_inv_requires_unit_leading():
    with pytest.raises(UsageError):
        series_inv(PuiseuxSeries(0, (2, 1, 1)))


def test_series_inv_monomial_leading():
    z = LaurentPoly.monomial
    a = PuiseuxSeries(Fraction(1, 3), (z(2), z(0, 3)))
    inv = series_inv(a)
    assert inv.leading_exponent == Fraction(-1, 3)
    assert inv.coeffs[0] == z(-2)


def test_sector_mismatch_raises():
    a = PuiseuxSeries(Fraction(1, 2), (1, 1))
    b = PuiseuxSeries(Fraction(1, 3), (1, 1))
    with pytest.raises(UsageError):
        a + b


def test_addition_aligns_within_sector():
    a = PuiseuxSeries(Fraction(1, 2), (1, 2, 3))
    b = PuiseuxSeries(Fraction(5, 2), (7,))
    total = a + b
    assert total.leading_exponent == Fraction(1, 2)
    assert total.coefficient_at(Fraction(5, 2)) == 10


def test_laurent_divexact_symmetric_quotient():
    # (z - z^-1) * (z^2 + 1 + z^-2) divided back
    num = LaurentPoly({3: 1, -3: -1})
    den = LaurentPoly({1: 1, -1: -1})
    q = num.divexact(den)
    assert q == LaurentPoly({2: 1, 0: 1, -2: 1})
    assert q.is_symmetric()
    assert q.eval_one() == 3


def test_laurent_divexact_nonexact_raises():
    with pytest.raises(ConsistencyError):
        LaurentPoly({1: 1, 0: 1}).divexact(LaurentPoly({1: 2}))


def test_geometric_series_inverse():
    one_minus_q = PuiseuxSeries(0, (1, -1, 0, 0, 0))
    geo = series_inv(one_minus_q)
    assert list(geo.coeffs) == [1, 1, 1, 1, 1]


def test_coefficient_at_off_sector_is_zero():
    a = PuiseuxSeries(Fraction(1, 2), (4, 5))
    assert a.coefficient_at(Fraction(1, 3)) == 0
    assert a.coefficient_at(Fraction(1, 2)) == 4
    assert a.coefficient_at(Fraction(7, 2)) == 0
