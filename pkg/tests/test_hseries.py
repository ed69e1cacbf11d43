from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dyntwist import HSeries, NotInvertible

N = 4

fracs = st.fractions(
    min_value=-10, max_value=10, max_denominator=12
)
series = st.lists(fracs, min_size=0, max_size=N + 1).map(
    lambda cs: HSeries(cs, N)
)


def test_constructors():
    assert HSeries.zero(N).is_zero()
    assert HSeries.one(N).coeff(0) == 1
    assert HSeries.constant(Fraction(3, 2), N).coeff(0) == Fraction(3, 2)
    h2 = HSeries.hbar(N, 2, 5)
    assert h2.coeff(2) == 5 and h2.coeff(0) == 0
    assert HSeries.hbar(N, N + 1).is_zero()


def test_valuation():
    assert HSeries.zero(N).valuation() is None
    assert HSeries.hbar(N, 3).valuation() == 3
    assert HSeries.one(N).valuation() == 0


@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + HSeries.zero(N) == a
    assert a * HSeries.one(N) == a
    assert (a - a).is_zero()


@given(series)
def test_truncation_is_multiplicative(a):
    h = HSeries.hbar(N, 1)
    assert (a * h).coeff(0) == 0
    for n in range(N):
        assert (a * h).coeff(n + 1) == a.coeff(n)
    assert a.shift(1) == a * h


@given(series)
def test_inverse(a):
    if a.is_unit():
        assert a * a.inverse() == HSeries.one(N)
    else:
        with pytest.raises(NotInvertible):
            a.inverse()


def test_mixed_orders_truncate_down():
    a = HSeries.one(6)
    b = HSeries.hbar(2, 1)
    assert (a + b).order == 2
    assert (a * b).order == 2


def test_shift_and_truncate():
    a = HSeries([1, 2, 3], N)
    assert a.shift(2).coeff(2) == 1 and a.shift(2).coeff(3) == 2
    t = a.truncate(1)
    assert t.order == 1 and t.coeff(1) == 2
