"""Tests for the constraint-system builders and their text format."""
import math
from fractions import Fraction

import pytest

from growthbound import lpmodel as lpm
from growthbound.elimination import COMPLETE, FloatConfig, eliminate, wilkinson_matrix
from growthbound.lpsolve import solve_float
from growthbound.matrix import Matrix


def test_wilkinson_lp_shape():
    lp = lpm.build_wilkinson_lp(3)
    assert lp.n == 3
    assert lp.program == "wilkinson"
    assert [r.k for r in lp.rows] == [1, 2, 3]
    assert all(r.l == 0 for r in lp.rows)
    assert lp.objective == {1: Fraction(1), 3: Fraction(-1)}


def test_wilkinson_row_coefficients():
    lp = lpm.build_wilkinson_lp(4)
    # row k: q_1 + ... + q_k - k q_k <= (k/2) ln k
    assert lp.rows[0].coeffs() == {}
    assert lp.rows[1].coeffs() == {1: 1, 2: -1}
    assert lp.rows[2].coeffs() == {1: 1, 2: 1, 3: -2}
    assert lp.rows[3].coeffs() == {1: 1, 2: 1, 3: 1, 4: -3}


def test_improved_lp_small_shape():
    lp = lpm.build_improved_lp(3, selector="full")
    # classical k = 1, 2, 3 plus the single pair (2, 1)
    assert [(r.k, r.l) for r in lp.rows] == [(1, 0), (2, 0), (3, 0), (2, 1)]
    pair = lp.rows[3]
    assert pair.coeffs() == {1: 1, 3: -1}
    assert pair.rhs_float == pytest.approx(math.log(5.5))


def test_improved_full_row_count():
    n = 100
    lp = lpm.build_improved_lp(n, selector="full")
    expected_pairs = sum(min(k - 1, n - k) for k in range(2, n))
    assert len(lp.rows) == n + expected_pairs


def test_row_coefficients_sum_to_zero():
    # constraints are invariant under q -> q + c, so each row must have
    # zero coefficient sum
    lp = lpm.build_improved_lp(40, selector="full")
    for r in lp.rows:
        assert sum(r.coeffs().values()) == 0


def test_objective_shift_invariant():
    lp = lpm.build_wilkinson_lp(9)
    assert sum(lp.objective.values()) == 0
    geo = lpm.build_geomean_lp(9)
    assert sum(geo.objective.values()) == 0


def test_geomean_default_objective():
    lp = lpm.build_geomean_lp(4)
    assert lp.objective == {
        1: Fraction(3, 4),
        2: Fraction(-1, 4),
        3: Fraction(-1, 4),
        4: Fraction(-1, 4),
    }


def test_geomean_weight_validation():
    with pytest.raises(ValueError):
        lpm.build_geomean_lp(3, weights=[1, 2])
    with pytest.raises(ValueError):
        lpm.build_geomean_lp(3, weights=[1, -1, 1])


def test_cumulative_rows_are_sparse():
    lp = lpm.cumulative_transform(lpm.build_improved_lp(60, selector="full"))
    assert lp.form == lpm.CUMULATIVE_FORM
    for r in lp.rows:
        assert r.prefix == 0
        assert r.nonzeros() <= 4


def test_cumulative_classical_row_pattern():
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(6))
    # row k = 1 is vacuous, row k >= 2 becomes k Q(k-1) + (1-k) Q(k)
    assert lp.rows[0].coeffs() == {}
    for k in range(2, 7):
        assert lp.rows[k - 1].coeffs() == {k - 1: k, k: 1 - k}


def test_cumulative_improved_row_pattern():
    lp = lpm.cumulative_transform(lpm.build_improved_lp(12, selector="full"))
    for r in lp.improved_rows():
        k, l = r.k, r.l
        want = {k - 1: l, k: 1 - l, k + l - 1: k - l, k + l: l - k}
        want = {i: c for i, c in want.items() if c}
        assert r.coeffs() == want


def test_cumulative_transform_rejects_double_apply():
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(4))
    with pytest.raises(ValueError):
        lpm.cumulative_transform(lp)


def test_cumulative_preserves_optimum():
    q_form = lpm.build_wilkinson_lp(30)
    both = [solve_float(q_form), solve_float(lpm.cumulative_transform(q_form))]
    assert both[0].objective_value == pytest.approx(both[1].objective_value, abs=1e-9)


@pytest.mark.parametrize("selector", lpm.SELECTORS)
def test_selectors_subset_of_full(selector):
    n = 73
    full = set(lpm.improved_pairs(n, "full"))
    got = list(lpm.improved_pairs(n, selector))
    assert set(got) <= full
    assert got == sorted(got)
    assert len(got) == len(set(got))


def test_selector_nesting():
    n = 120
    band = set(lpm.improved_pairs(n, "band"))
    assert set(lpm.improved_pairs(n, "theorem1")) <= band
    assert band <= set(lpm.improved_pairs(n, "band+diagonal"))
    diag = set(lpm.improved_pairs(n, "diagonal"))
    assert band | diag == set(lpm.improved_pairs(n, "band+diagonal"))
    assert set(lpm.improved_pairs(n, "wilkinson-only")) == set()


def test_band_membership_uses_integer_sqrt():
    # band keeps k + l in [isqrt(2 k^2), isqrt(2 k^2) + C]
    n, width = 200, 4
    pairs = set(lpm.improved_pairs(n, "band", band_width=width))
    for k, l in pairs:
        base = math.isqrt(2 * k * k)
        assert base <= k + l <= base + width
    # and everything in the window that is a legal pair is present
    for k in range(2, n):
        base = math.isqrt(2 * k * k)
        for s in range(base, base + width + 1):
            l = s - k
            if 1 <= l <= min(k - 1, n - k):
                assert (k, l) in pairs


def test_theorem1_selector_single_pair_per_k():
    got = dict(lpm.improved_pairs(300, "theorem1"))
    for k, l in got.items():
        assert k + l == math.isqrt(2 * k * k) + 1
    assert got[5] == 3


def test_selector_validation():
    with pytest.raises(ValueError):
        list(lpm.improved_pairs(10, "nope"))
    with pytest.raises(ValueError):
        list(lpm.improved_pairs(10, "band", band_width=-1))


def test_rhs_enclosure_exact_for_k1():
    assert lpm.rhs_enclosure(lpm.RhsExpr(1)) == 0
    assert lpm.RhsExpr(1).value_float() == 0.0


def test_rhs_enclosure_brackets_ln2():
    upper = lpm.rhs_enclosure(lpm.RhsExpr(2), 60)
    assert Fraction("0.693147180559945") < upper < Fraction("0.693147180559946")


def test_rhs_enclosure_is_upper_bound_and_tightens():
    import mpmath

    for k in (2, 3, 17, 500):
        for improved in (False, True):
            expr = lpm.RhsExpr(k, improved=improved)
            u60 = lpm.rhs_enclosure(expr, 60)
            u80 = lpm.rhs_enclosure(expr, 80)
            assert u80 <= u60
            with mpmath.workdps(60):
                truth = 0.5 * k * mpmath.log(mpmath.mpf(expr.argument().numerator)
                                             / expr.argument().denominator)
                for u in (u60, u80):
                    val = mpmath.mpf(u.numerator) / mpmath.mpf(u.denominator)
                    assert val >= truth
                    assert val - truth <= mpmath.mpf(2) ** -59 * max(1, truth)


def test_rhs_enclosure_rejects_bad_k():
    with pytest.raises(ValueError):
        lpm.rhs_enclosure(lpm.RhsExpr(0))


def test_dump_parse_round_trip():
    lp = lpm.cumulative_transform(lpm.build_improved_lp(25, selector="band"))
    back = lpm.parse_lp(lpm.dump_lp(lp))
    assert back.n == lp.n
    assert back.program == lp.program
    assert back.form == lp.form
    assert back.selector == lp.selector
    assert back.band_width == lp.band_width
    assert back.precision_bits == lp.precision_bits
    assert back.objective == lp.objective
    assert len(back.rows) == len(lp.rows)
    for a, b in zip(lp.rows, back.rows):
        assert (a.k, a.l) == (b.k, b.l)
        assert a.coeffs() == b.coeffs()
        assert a.rhs_upper == b.rhs_upper


def test_save_load_round_trip(tmp_path):
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(12))
    path = tmp_path / "instance.lp"
    lpm.save_lp(lp, path)
    back = lpm.load_lp(path)
    assert back.objective == lp.objective
    assert [(r.k, r.l, r.rhs_upper) for r in back.rows] == [
        (r.k, r.l, r.rhs_upper) for r in lp.rows
    ]


def test_parse_rejects_empty():
    with pytest.raises(ValueError):
        lpm.parse_lp("\n\n")


def _cp_pivots(mat: Matrix):
    trace = eliminate(mat, strategy=COMPLETE, float_config=FloatConfig(53))
    return [trace.pivot_magnitude(k) for k in range(1, mat.rows + 1)]


@pytest.mark.parametrize("program", lpm.PROGRAMS)
def test_elimination_pivots_are_feasible(program):
    import random

    rng = random.Random(20240311)
    for _ in range(5):
        rows = [[rng.uniform(-1, 1) for _ in range(10)] for _ in range(10)]
        pivots = _cp_pivots(Matrix(rows, "binary64-real"))
        assert lpm.check_pivot_feasibility(pivots, program) == []


@pytest.mark.parametrize("program", lpm.PROGRAMS)
def test_wilkinson_matrix_pivots_are_feasible(program):
    pivots = _cp_pivots(wilkinson_matrix(24, mode="binary64-real"))
    assert lpm.check_pivot_feasibility(pivots, program) == []


def test_infeasible_pivots_are_flagged():
    # a size-1 pivot much larger than the later ones breaks the classical
    # constraints at k = 2 and k = 3
    violations = lpm.check_pivot_feasibility([100.0, 1.0, 1.0], "wilkinson-opt")
    assert {(v.k, v.l) for v in violations} == {(2, 0), (3, 0)}
    assert all(v.slack < 0 for v in violations)


def test_check_pivot_feasibility_validation():
    with pytest.raises(ValueError):
        lpm.check_pivot_feasibility([1.0, -1.0], "wilkinson-opt")
    with pytest.raises(ValueError):
        lpm.check_pivot_feasibility([1.0], "nope")


def test_build_rejects_bad_n():
    with pytest.raises(ValueError):
        lpm.build_wilkinson_lp(0)
    with pytest.raises(ValueError):
        lpm.build_improved_lp(0)
    with pytest.raises(ValueError):
        lpm.build_geomean_lp(0)
