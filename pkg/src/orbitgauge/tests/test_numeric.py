import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ..engine.numeric import (INFINITY, Ordering, as_rational, ceil_int, cmp_power, exp_bounds, floor_strict,
                              parse_extended, parse_rational, render_rational, root_bounds, to_decimal)
from ..error_handlers import InvalidArgument

positive_fractions = st.fractions(min_value=Fraction(1, 1000), max_value=Fraction(1000), max_denominator=1000)


@pytest.mark.unit
@pytest.mark.parametrize('text, expected', [
    ('3/4', Fraction(3, 4)),
    ('7', Fraction(7)),
    ('0.25', Fraction(1, 4)),
    ('-2.7', Fraction(-27, 10)),
    (' 99/70 ', Fraction(99, 70)),
])
def test_parse_rational(text, expected):
    """Fractions, integers and decimals parse exactly."""
    assert parse_rational(text) == expected


@pytest.mark.unit
@pytest.mark.parametrize('text', ['', 'nan', 'inf', '1e3', '1/0', 'abc', '1_000'])
def test_parse_rational_rejects(text):
    """Empty text, exponents, nan/inf and junk are invalid."""
    with pytest.raises(InvalidArgument):
        parse_rational(text)


def test_parse_rational_rejects_non_strings():
    """Floats never cross the parsing boundary."""
    with pytest.raises(InvalidArgument):
        parse_rational(0.5)
    with pytest.raises(InvalidArgument):
        as_rational(0.5)
    with pytest.raises(InvalidArgument):
        as_rational(True)


def test_extended_values():
    """+inf parses and renders as "inf"."""
    assert parse_extended('inf') == INFINITY
    assert render_rational(INFINITY) == 'inf'
    assert render_rational(Fraction(6, 4)) == '3/2'
    assert render_rational(Fraction(5)) == '5'
    with pytest.raises(InvalidArgument):
        render_rational(0.5)


def test_to_decimal_rounds_half_even():
    """Display rounding is half-even at the requested place."""
    assert to_decimal(Fraction(1, 3), 4) == '0.3333'
    assert to_decimal(Fraction(1, 8), 2) == '0.12'
    assert to_decimal(Fraction(3, 8), 2) == '0.38'
    assert to_decimal(INFINITY, 3) == 'inf'


def test_floor_and_ceil():
    """floor_strict reports integrality; ceil_int handles negatives."""
    assert floor_strict(Fraction(-299, 100)) == (-3, False)
    assert floor_strict(Fraction(4)) == (4, True)
    assert ceil_int(Fraction(7, 2)) == 4
    assert ceil_int(Fraction(-7, 2)) == -3
    assert ceil_int(Fraction(3)) == 3


def test_cmp_power():
    """x against y^(1/m) without irrational arithmetic."""
    assert cmp_power(Fraction(3, 2), Fraction(2), 2) is Ordering.GREATER
    assert cmp_power(Fraction(7, 5), Fraction(2), 2) is Ordering.LESS
    assert cmp_power(Fraction(2), Fraction(8), 3) is Ordering.EQUAL
    assert cmp_power(Fraction(-1), Fraction(8), 3) is Ordering.LESS
    with pytest.raises(InvalidArgument):
        cmp_power(Fraction(1), Fraction(0), 2)
    with pytest.raises(InvalidArgument):
        cmp_power(Fraction(1), Fraction(2), 0)


def test_root_bounds_exact_cases():
    """Rational roots found during bisection are returned exactly."""
    assert root_bounds(Fraction(7, 3), 1) == (Fraction(7, 3), Fraction(7, 3))
    assert root_bounds(Fraction(1, 4), 2) == (Fraction(1, 2), Fraction(1, 2))


@pytest.mark.property
@settings(max_examples=50, deadline=None)
@given(y=positive_fractions, m=st.integers(min_value=2, max_value=4))
def test_root_bounds_bracket(y, m):
    """lo^m <= y <= hi^m and the bracket is relatively tight."""
    lo, hi = root_bounds(y, m, bits=40)
    assert lo ** m <= y <= hi ** m
    assert hi - lo <= hi / 2 ** 40


@pytest.mark.property
@settings(max_examples=30, deadline=None)
@given(q=st.fractions(min_value=-5, max_value=5, max_denominator=50))
def test_exp_bounds_enclose(q):
    """The enclosure contains e^q (checked against floats with margin)."""
    tolerance = Fraction(1, 10**6)
    lo, hi = exp_bounds(q, tolerance)
    assert lo <= hi
    assert hi - lo <= tolerance * hi * 2
    value = math.exp(float(q))
    assert float(lo) <= value * (1 + 1e-12)
    assert float(hi) >= value * (1 - 1e-12)


def test_exp_bounds_zero():
    """e^0 is enclosed exactly."""
    assert exp_bounds(Fraction(0), Fraction(1, 10)) == (Fraction(1), Fraction(1))
