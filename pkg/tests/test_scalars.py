import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from starrep.errors import (NoExactRoot, NonInvertible, NonRealSeries, NotDivisible,
                            NotPositive, OrderMismatch)
from starrep.scalars import (FormalScalar, GaussRational, Sign, binomial, is_positive,
                             rational_sqrt, series_invert, series_sqrt, truncation)

lam = FormalScalar.lam

small = st.fractions(min_value=-5, max_value=5, max_denominator=7)
real_series = st.lists(small, min_size=1, max_size=7).map(
    lambda cs: FormalScalar.series([mpq(c.numerator, c.denominator) for c in cs]))


def test_lambda_powers_truncate():
    assert lam() * lam(5) == lam(6)
    assert (lam() * lam(6)).is_zero()
    with truncation(2):
        assert lam(3).is_zero()
        assert FormalScalar.one().order == 2


def test_mixed_orders_rejected():
    with truncation(2):
        a = FormalScalar.one()
    with pytest.raises(OrderMismatch):
        a + FormalScalar.one()


def test_inverse_of_one_minus_lambda():
    # geometric series, written out by hand
    inv = series_invert(1 - lam())
    assert inv == FormalScalar.series([1] * 7)
    assert inv * (1 - lam()) == FormalScalar.one()


def test_inverse_requires_unit():
    with pytest.raises(NonInvertible):
        series_invert(lam())


def test_complex_coefficients():
    i = GaussRational(0, 1)
    a = FormalScalar.series([1, i])
    assert a * a.conj() == FormalScalar.series([1, 0, 1])
    assert not a.is_real()
    with pytest.raises(NonRealSeries):
        is_positive(a)


def test_sqrt_hensel():
    # (1 + lam)^2 = 1 + 2 lam + lam^2
    assert series_sqrt(FormalScalar.series([1, 2, 1])) == FormalScalar.series([1, 1])
    r = series_sqrt(FormalScalar.series([4, 1]))
    assert r * r == FormalScalar.series([4, 1])
    assert r.coeffs[1] == GaussRational(mpq(1, 4))
    with pytest.raises(NoExactRoot):
        series_sqrt(FormalScalar.constant(2))
    with pytest.raises(NotPositive):
        series_sqrt(FormalScalar.series([0, 1]))


def test_rational_sqrt():
    assert rational_sqrt(mpq(9, 4)) == mpq(3, 2)
    assert rational_sqrt(mpq(2)) is None


def test_divide_lambda():
    assert FormalScalar.series([0, 0, 3, 1]).divide_lambda(2) == FormalScalar.series([3, 1])
    with pytest.raises(NotDivisible):
        FormalScalar.series([1, 1]).divide_lambda(1)


def test_binomial_half():
    # (1+x)^(1/2) = 1 + x/2 - x^2/8 + x^3/16 - ...
    assert [binomial(mpq(1, 2), k) for k in range(4)] == [1, mpq(1, 2), mpq(-1, 8), mpq(1, 16)]


def test_ordering_examples():
    assert lam() > 0
    assert lam() < 1
    assert -lam() + lam(2) < 0
    assert is_positive(FormalScalar.zero()) is Sign.ZERO
    assert FormalScalar.series([0, 0, -1, 100]) < 0


def test_non_archimedean_witness():
    for n in (1, 10, 1000, 10 ** 6):
        assert lam().scale(n) < 1


def test_json_round_trip():
    a = FormalScalar.series([mpq(1, 3), GaussRational(0, -2), 0, 5])
    assert FormalScalar.from_json(a.to_json()) == a


@settings(max_examples=200, deadline=None)
@given(real_series)
def test_trichotomy(a):
    signs = [a > 0, a.is_zero(), a < 0]
    assert signs.count(True) == 1


@settings(max_examples=200, deadline=None)
@given(real_series, real_series)
def test_cone_closed(a, b):
    if a > 0 and b > 0:
        assert a + b > 0
        assert a * b > 0


@settings(max_examples=100, deadline=None)
@given(real_series, real_series, real_series)
def test_ring_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
