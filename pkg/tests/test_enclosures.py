import math
from fractions import Fraction

import pytest

from growthbound import enclosures as enc


def as_mp(x: Fraction):
    import mpmath

    return mpmath.mpf(x.numerator) / mpmath.mpf(x.denominator)


@pytest.mark.parametrize("x", [
    Fraction(2), Fraction(3), Fraction(1, 2), Fraction(10, 7),
    Fraction(1), Fraction(1000000), Fraction(1, 999983),
    Fraction(11 * 5000, 4),
])
def test_ln_interval_contains_truth(x):
    # the enclosure is ~1e-18 wide, so every comparison has to happen at
    # well above binary64 precision
    import mpmath

    lo, hi = enc.ln_interval(x, 60)
    with mpmath.workdps(120):
        truth = mpmath.log(as_mp(x))
        assert as_mp(lo) <= truth <= as_mp(hi)


@pytest.mark.parametrize("x", [Fraction(2), Fraction(97), Fraction(5, 3)])
def test_ln_interval_width(x):
    lo, hi = enc.ln_interval(x, 60)
    width_cap = Fraction(1, 2 ** 60) * max(1, abs(hi))
    assert hi - lo <= 2 * width_cap


def test_ln_one_is_exact_zero():
    lo, hi = enc.ln_interval(Fraction(1), 60)
    assert lo == 0 and hi == 0


def test_ln_upper_monotone_in_precision():
    # more precision can only tighten the one-sided enclosures
    for x in (Fraction(2), Fraction(17, 5), Fraction(4096)):
        assert enc.ln_upper(x, 80) <= enc.ln_upper(x, 60)
        assert enc.ln_lower(x, 80) >= enc.ln_lower(x, 60)


def test_ln_upper_bracket_example():
    hi = enc.ln_upper(Fraction(2), 60)
    lo = enc.ln_lower(Fraction(2), 60)
    assert Fraction("0.693147180559945") <= lo <= hi <= Fraction("0.693147180559946")


def test_ln_rejects_nonpositive():
    with pytest.raises(ValueError):
        enc.ln_interval(Fraction(0), 60)
    with pytest.raises(ValueError):
        enc.ln_interval(Fraction(-3), 60)


def test_sqrt2_interval():
    lo, hi = enc.sqrt2_interval(60)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(1, 2 ** 60)
    tighter_lo, tighter_hi = enc.sqrt2_interval(100)
    assert lo <= tighter_lo and tighter_hi <= hi


def test_alpha_interval_brackets_reference():
    # alpha = 1 / (2 (2 + (2 - sqrt 2) ln 2)) to fifteen digits
    ref = 0.2078106706507003
    lo, hi = enc.alpha_interval(60)
    assert float(lo) == pytest.approx(ref, abs=1e-12)
    assert float(hi) == pytest.approx(ref, abs=1e-12)
    assert lo <= Fraction(ref).limit_denominator(10 ** 15) <= hi or lo < hi


def test_alpha_interval_is_ordered_and_tight():
    lo, hi = enc.alpha_interval(60)
    assert 0 < lo < hi < 1
    assert hi - lo <= Fraction(1, 2 ** 50)


def test_theorem1_rhs_lower_below_truth():
    import mpmath

    for n in (2, 10, 100, 5000):
        got = enc.theorem1_rhs_lower(n, 60)
        with mpmath.workdps(60):
            s2 = mpmath.sqrt(2)
            alpha = 1 / (2 * (2 + (2 - s2) * mpmath.log(2)))
            truth = alpha * mpmath.log(n) ** 2 + mpmath.mpf("0.91") * mpmath.log(n)
            assert as_mp(got) <= truth
            # and not absurdly loose
            assert truth - as_mp(got) < 1e-9


def test_theorem1_rhs_lower_rejects_small_n():
    with pytest.raises(ValueError):
        enc.theorem1_rhs_lower(1, 60)


def test_dyadic_rounding_directions():
    x = Fraction(1, 3)
    up = enc.dyadic_ceil(x, 10)
    dn = enc.dyadic_floor(x, 10)
    assert dn <= x <= up
    assert up.denominator <= 2 ** 10 and dn.denominator <= 2 ** 10
    assert up - dn <= Fraction(1, 2 ** 10)
    # exactly representable values pass through unchanged
    y = Fraction(5, 8)
    assert enc.dyadic_ceil(y, 10) == y == enc.dyadic_floor(y, 10)
