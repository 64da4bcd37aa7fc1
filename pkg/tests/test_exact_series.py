from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dangular.exact_series import (
    ContractViolation,
    SchemePoly,
    TruncSeries,
    poly_divided_difference,
    poly_eval,
    poly_subst_chain,
    power_online,
    sp_subst_chain,
    ts_binomial,
    ts_derive,
    ts_inv,
    ts_mul,
    ts_pow,
    ts_subst_power,
)

ORDER = 6
coef = st.one_of(st.integers(-20, 20), st.fractions(min_value=-5, max_value=5, max_denominator=7))
series = st.lists(coef, min_size=ORDER + 1, max_size=ORDER + 1).map(lambda cs: TruncSeries(cs, ORDER))


@settings(max_examples=60, deadline=None)
@given(series, series, series)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (b + c) == (a + b) + c
    assert a * TruncSeries.one(ORDER) == a
    assert a - a == TruncSeries.zero(ORDER)


@settings(max_examples=40, deadline=None)
@given(series)
def test_inverse(a):
    if a[0] == 0:
        with pytest.raises(ContractViolation):
            ts_inv(a)
    else:
        assert ts_mul(a, ts_inv(a)) == TruncSeries.one(ORDER)


@settings(max_examples=30, deadline=None)
@given(series, st.integers(0, 5))
def test_power_is_repeated_product(a, m):
    expected = TruncSeries.one(ORDER)
    for _ in range(m):
        expected = expected * a
    assert ts_pow(a, m) == expected


def test_coefficients_are_normalised():
    s = TruncSeries([Fraction(4, 2), Fraction(1, 3)])
    assert type(s[0]) is int and s[0] == 2
    assert s[1] == Fraction(1, 3)


def test_truncation_contract():
    s = TruncSeries([1, 2, 3])
    assert s.order == 2
    with pytest.raises(ContractViolation):
        s[3]
    with pytest.raises(ContractViolation):
        s.truncate(5)
    assert s[-1] == 0
    with pytest.raises(ContractViolation):
        TruncSeries([1, 1]) * TruncSeries([1, 1, 1])


def test_binomial_half_integer():
    # (1 - 4z)^(-1/2) = sum binom(2n, n) z^n
    s = ts_binomial(-1, 2, 4, 8)
    assert s.coeffs == [1, 2, 6, 20, 70, 252, 924, 3432, 12870]
    # (1 - z)^2
    assert ts_binomial(2, 1, 1, 4).coeffs == [1, -2, 1, 0, 0]
    with pytest.raises(ContractViolation):
        ts_binomial(1, 3, 1, 4)


def test_derive_and_substitution():
    a = TruncSeries([1, 1, 1, 1])
    assert ts_derive(a).coeffs == [1, 2, 3]
    assert ts_subst_power(a, 2).coeffs == [0, 1, 0, 1, 0, 1, 0, 1]
    with pytest.raises(ContractViolation):
        ts_subst_power(a, 2, 9)


def test_power_online_matches_product():
    y = [1, 3, -2, 5, 7]
    Y = TruncSeries(y)
    for m in (1, 2, 5):
        w = [1]
        for n in range(1, 5):
            w.append(power_online(y, w, m, n))
        assert w == ts_pow(Y, m).coeffs


def test_divided_difference_and_chain():
    # a = x^2: (x^3 - x1^3)/(x - x1)
    dd = poly_divided_difference({(2,): 1}, 1)
    assert dd == {(2, 0): 1, (1, 1): 1, (0, 2): 1}
    for x, x1 in ((2, 5), (Fraction(1, 3), 4)):
        assert poly_eval(dd, (x, x1)) == (x ** 3 - x1 ** 3) / Fraction(x - x1)
    # d/dx1 of x x1 x2, then x2 becomes x1: x x1
    assert poly_subst_chain({(1, 1, 1): 1}, 1) == {(1, 1): 1}
    assert poly_subst_chain({(0, 2): 3}, 1) == {(1,): 6}
    sp = SchemePoly([{}, {(1, 1, 1): 1}], 2)
    out = sp_subst_chain(sp, 1)
    assert out.var_count == 1 and out.coeff(1, (1, 1)) == 1
    with pytest.raises(ContractViolation):
        sp_subst_chain(sp, 3)
