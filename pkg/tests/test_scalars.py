import math
from fractions import Fraction

import pytest

from growthbound import scalars
from growthbound.scalars import (
    BINARY64_COMPLEX,
    BINARY64_REAL,
    QComplex,
    RATIONAL_COMPLEX,
    RATIONAL_REAL,
)


def test_mode_registry():
    assert set(scalars.MODES) == {
        RATIONAL_REAL, RATIONAL_COMPLEX, BINARY64_REAL, BINARY64_COMPLEX,
    }
    assert scalars.is_exact_mode(RATIONAL_REAL)
    assert scalars.is_exact_mode(RATIONAL_COMPLEX)
    assert not scalars.is_exact_mode(BINARY64_REAL)


def test_qcomplex_field_ops():
    a = QComplex(Fraction(1, 2), Fraction(-3, 4))
    b = QComplex(Fraction(2), Fraction(1, 3))
    assert a + b == QComplex(Fraction(5, 2), Fraction(-5, 12))
    assert a - a == QComplex(Fraction(0), Fraction(0))
    prod = a * b
    assert prod.re == Fraction(1, 2) * 2 - Fraction(-3, 4) * Fraction(1, 3)
    assert prod.im == Fraction(1, 2) * Fraction(1, 3) + Fraction(-3, 4) * 2
    quot = prod / b
    assert quot == a
    assert a.conjugate().im == Fraction(3, 4)
    assert a.abs_sq() == Fraction(1, 4) + Fraction(9, 16)


def test_qcomplex_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QComplex(Fraction(1), Fraction(0)) / QComplex(Fraction(0), Fraction(0))


@pytest.mark.parametrize("mode,value,expected", [
    (RATIONAL_REAL, Fraction(-3, 5), Fraction(9, 25)),
    (BINARY64_REAL, -0.5, 0.25),
    (BINARY64_COMPLEX, 3 + 4j, 25.0),
])
def test_abs_sq(mode, value, expected):
    assert scalars.abs_sq(value, mode) == expected


def test_abs_sq_rational_complex_is_exact():
    z = QComplex(Fraction(3, 7), Fraction(-4, 7))
    assert scalars.abs_sq(z, RATIONAL_COMPLEX) == Fraction(25, 49)


def test_round_binary_matches_hardware():
    # binary64 has 53 mantissa bits, so rounding to 53 is the identity on
    # anything that came from a float
    for x in (0.1, -2.7, 1e300, 5e-324, 0.0):
        assert scalars.round_binary(x, 53) == x


def test_round_binary_ties_to_even():
    # with 10 significand bits the spacing at 1 is 2^-9; both points below
    # sit exactly on a tie and must round to the even neighbour
    x = 1.0 + 2.0 ** -10
    assert scalars.round_binary(x, 10) == 1.0
    x = 1.0 + 3.0 * 2.0 ** -10
    assert scalars.round_binary(x, 10) == 1.0 + 2.0 ** -8


def test_round_binary_low_precision():
    assert scalars.round_binary(1.9, 1) == 2.0
    assert scalars.round_binary(0.3, 2) == 0.3125 or scalars.round_binary(0.3, 2) == 0.25


@pytest.mark.parametrize("mode,text", [
    (RATIONAL_REAL, "-7/3"),
    (RATIONAL_REAL, "4"),
    (BINARY64_REAL, "2.5"),
    (RATIONAL_COMPLEX, "1/2,-3/4"),
    (BINARY64_COMPLEX, "0.5,1.25"),
])
def test_entry_round_trip(mode, text):
    v = scalars.parse_entry(text, mode)
    assert scalars.parse_entry(scalars.format_entry(v, mode), mode) == v


def test_parse_entry_rejects_mismatched_shape():
    with pytest.raises(ValueError):
        scalars.parse_entry("1,2", RATIONAL_REAL)


def test_to_float_scalar():
    assert scalars.to_float_scalar(Fraction(1, 4), RATIONAL_REAL) == 0.25
    z = scalars.to_float_scalar(QComplex(Fraction(1, 2), Fraction(1)), RATIONAL_COMPLEX)
    assert z == 0.5 + 1.0j
    assert scalars.float_mode_of(RATIONAL_COMPLEX) == BINARY64_COMPLEX
    assert scalars.float_mode_of(BINARY64_REAL) == BINARY64_REAL


def test_magnitude_is_sqrt_of_abs_sq():
    z = QComplex(Fraction(3), Fraction(4))
    assert scalars.magnitude(z, RATIONAL_COMPLEX) == pytest.approx(5.0)
    assert scalars.magnitude(Fraction(-2, 3), RATIONAL_REAL) == pytest.approx(2 / 3)
    assert scalars.magnitude(-1.5, BINARY64_REAL) == 1.5
    assert math.isinf(scalars.magnitude(float("inf"), BINARY64_REAL))
