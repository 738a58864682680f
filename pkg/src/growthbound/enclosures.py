"""Directed rational enclosures of the transcendental quantities the
certificates depend on: ln x for rational x, sqrt(2), and the leading
coefficient 1/(2(2+(2-sqrt(2))ln 2)) of the closed-form growth bound.

All results are Fractions rounded outward onto a dyadic grid, so a request
at higher precision always returns an enclosure nested inside the lower
precision one.  gmpy2 rationals are used internally; the series tails are
bounded exactly, never estimated.
"""
from __future__ import annotations

import math
from fractions import Fraction

from gmpy2 import mpq

# grid is finer than the working tolerance so outward rounding cannot
# push the width past 2^-bits
_WORK_SLACK = 8
_GRID_SLACK = 20


def dyadic_ceil(x, bits: int) -> Fraction:
    """Smallest multiple of 2^-bits that is >= x."""
    num, den = x.numerator, x.denominator
    q, r = divmod(num << bits, den)
    return Fraction(q + (1 if r else 0), 1 << bits)


def dyadic_floor(x, bits: int) -> Fraction:
    num, den = x.numerator, x.denominator
    q, _ = divmod(num << bits, den)
    return Fraction(q, 1 << bits)


def _atanh_bounds(t, bits: int):
    """(lo, hi) around atanh(t) for 0 <= t < 1; tail bounded by the exact
    geometric majorant t^(2j+1) / ((2j+1)(1 - t^2))."""
    if t == 0:
        return mpq(0), mpq(0)
    tsq = t * t
    s = mpq(0)
    term = t
    j = 0
    target = mpq(1, 1 << bits)
    while True:
        s += term / (2 * j + 1)
        term *= tsq
        j += 1
        tail = term / ((2 * j + 1) * (1 - tsq))
        if tail <= target * max(mpq(1), s):
            return s, s + tail


_ln2_cache: dict = {}


def _ln2_bounds(bits: int):
    if bits not in _ln2_cache:
        lo, hi = _atanh_bounds(mpq(1, 3), bits + 2)
        _ln2_cache[bits] = (2 * lo, 2 * hi)
    return _ln2_cache[bits]


def _ln_bounds_raw(num: int, den: int, bits: int):
    if num <= 0 or den <= 0:
        raise ValueError("ln needs a positive rational")
    e = 0
    n_, d_ = num, den
    while n_ >= 2 * d_:
        d_ <<= 1
        e += 1
    while n_ < d_:
        n_ <<= 1
        e -= 1
    t = mpq(n_ - d_, n_ + d_)
    lo, hi = _atanh_bounds(t, bits + 4)
    lo, hi = 2 * lo, 2 * hi
    if e:
        l2lo, l2hi = _ln2_bounds(bits + 4)
        if e > 0:
            lo += e * l2lo
            hi += e * l2hi
        else:
            lo += e * l2hi
            hi += e * l2lo
    return lo, hi


def ln_interval(x, bits: int = 60):
    """(lo, hi) Fractions with lo <= ln x <= hi and
    hi - lo <= 2^-bits * max(1, |ln x|)."""
    x = Fraction(x)
    lo, hi = _ln_bounds_raw(x.numerator, x.denominator, bits + _WORK_SLACK)
    grid = bits + _GRID_SLACK
    return dyadic_floor(lo, grid), dyadic_ceil(hi, grid)


def ln_upper(x, bits: int = 60) -> Fraction:
    return ln_interval(x, bits)[1]


def ln_lower(x, bits: int = 60) -> Fraction:
    return ln_interval(x, bits)[0]


def sqrt2_interval(bits: int = 60):
    p = bits + 2
    r = math.isqrt(2 << (2 * p))
    return Fraction(r, 1 << p), Fraction(r + 1, 1 << p)


def alpha_interval(bits: int = 60):
    """Enclosure of 1/(2(2+(2-sqrt(2))ln 2)), the coefficient in front of
    ln^2 n in the closed-form bound."""
    work = bits + _WORK_SLACK
    s_lo, s_hi = sqrt2_interval(work)
    l_lo, l_hi = ln_interval(2, work)
    hi = 1 / (2 * (2 + (2 - s_hi) * l_lo))
    lo = 1 / (2 * (2 + (2 - s_lo) * l_hi))
    grid = bits + _GRID_SLACK
    return dyadic_floor(lo, grid), dyadic_ceil(hi, grid)


def theorem1_rhs_lower(n: int, bits: int = 60) -> Fraction:
    """Rational lower bound for alpha ln^2 n + 0.91 ln n at integer n >= 2.

    Comparing a certified upper bound against this value proves the bound
    really sits below the stated curve, with no float step anywhere.
    """
    if n < 2:
        raise ValueError("n >= 2 required")
    a_lo, _ = alpha_interval(bits)
    l_lo = ln_lower(n, bits)
    return a_lo * l_lo * l_lo + Fraction(91, 100) * l_lo
