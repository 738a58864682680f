"""Scalar modes and arithmetic helpers shared by the matrix routines.

Four entry modes are supported: exact rationals, exact complex rationals
(pairs of rationals), and the two binary64 modes.  Exact comparisons on
complex values always go through the squared modulus, which stays rational.
"""
from __future__ import annotations

import math
from fractions import Fraction

RATIONAL_REAL = "rational-real"
RATIONAL_COMPLEX = "rational-complex"
BINARY64_REAL = "binary64-real"
BINARY64_COMPLEX = "binary64-complex"

MODES = (RATIONAL_REAL, RATIONAL_COMPLEX, BINARY64_REAL, BINARY64_COMPLEX)

_EXACT = (RATIONAL_REAL, RATIONAL_COMPLEX)


class QComplex:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __add__(self, other):
        other = _as_qc(other)
        return QComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qc(other)
        return QComplex(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _as_qc(other) - self

    def __mul__(self, other):
        other = _as_qc(other)
        return QComplex(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_qc(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero QComplex")
        return QComplex(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        return _as_qc(other) / self

    def __neg__(self):
        return QComplex(-self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QComplex):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def conjugate(self):
        return QComplex(self.re, -self.im)

    def abs_sq(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QComplex({self.re!r}, {self.im!r})"


def _as_qc(x) -> QComplex:
    if isinstance(x, QComplex):
        return x
    if isinstance(x, (int, Fraction)):
        return QComplex(x, 0)
    raise TypeError(f"cannot mix QComplex with {type(x).__name__}")


def is_exact_mode(mode: str) -> bool:
    return mode in _EXACT


def zero(mode: str):
    if mode == RATIONAL_REAL:
        return Fraction(0)
    if mode == RATIONAL_COMPLEX:
        return QComplex(0, 0)
    if mode == BINARY64_REAL:
        return 0.0
    if mode == BINARY64_COMPLEX:
        return complex(0.0, 0.0)
    raise ValueError(f"unknown mode {mode!r}")


def one(mode: str):
    if mode == RATIONAL_REAL:
        return Fraction(1)
    if mode == RATIONAL_COMPLEX:
        return QComplex(1, 0)
    if mode == BINARY64_REAL:
        return 1.0
    return complex(1.0, 0.0)


def abs_sq(x, mode: str):
    """Squared modulus; exact (a Fraction) in the rational modes."""
    if mode == RATIONAL_REAL:
        return x * x
    if mode == RATIONAL_COMPLEX:
        return x.abs_sq()
    if mode == BINARY64_COMPLEX:
        return x.real * x.real + x.imag * x.imag
    return x * x


def magnitude(x, mode: str):
    """Modulus of an entry.  Exact for rational-real, float otherwise."""
    if mode == RATIONAL_REAL:
        return -x if x < 0 else x
    if mode == RATIONAL_COMPLEX:
        return math.sqrt(float(x.abs_sq()))
    return abs(x)


def to_float_scalar(x, mode: str):
    if mode == RATIONAL_REAL:
        return float(x)
    if mode == RATIONAL_COMPLEX:
        return complex(x)
    return x


def float_mode_of(mode: str) -> str:
    return BINARY64_COMPLEX if mode in (RATIONAL_COMPLEX, BINARY64_COMPLEX) else BINARY64_REAL


def round_binary(x: float, bits: int) -> float:
    """Round a binary64 value to ``bits`` significand bits (to nearest, ties to even)."""
    if bits >= 53 or x == 0.0 or not math.isfinite(x):
        return x
    m, e = math.frexp(x)
    scaled = m * (1 << bits)
    r = round(scaled)
    return math.ldexp(r, e - bits)


def round_binary_complex(x: complex, bits: int) -> complex:
    if bits >= 53:
        return x
    return complex(round_binary(x.real, bits), round_binary(x.imag, bits))


def _parse_fraction(tok: str) -> Fraction:
    return Fraction(tok)


def parse_entry(tok: str, mode: str):
    """Parse one matrix entry token.  Complex tokens are 're,im'."""
    if mode == RATIONAL_REAL:
        return _parse_fraction(tok)
    if mode == RATIONAL_COMPLEX:
        re, _, im = tok.partition(",")
        if not _ or im == "":
            return QComplex(_parse_fraction(re), 0)
        return QComplex(_parse_fraction(re), _parse_fraction(im))
    if mode == BINARY64_REAL:
        return float(tok)
    re, _, im = tok.partition(",")
    if not _ or im == "":
        return complex(float(re), 0.0)
    return complex(float(re), float(im))


def format_entry(x, mode: str) -> str:
    if mode == RATIONAL_REAL:
        return str(x)
    if mode == RATIONAL_COMPLEX:
        return f"{x.re},{x.im}"
    if mode == BINARY64_REAL:
        return repr(x)
    return f"{x.real!r},{x.imag!r}"
