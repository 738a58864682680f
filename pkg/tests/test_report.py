"""Tests for report objects, figure data, CSV/SVG writers, and the demo."""
import json
import math
from fractions import Fraction

import pytest

from growthbound import lpmodel as lpm
from growthbound import lpsolve as lps
from growthbound import report as rep


def test_geometric_grid_shape():
    grid = rep.geometric_grid(5000, points=40)
    assert grid[0] == 2 and grid[-1] == 5000
    assert grid == sorted(set(grid))
    assert 20 <= len(grid) <= 40
    assert rep.geometric_grid(2) == [2]
    assert rep.geometric_grid(10, points=2) == [2, 10]
    with pytest.raises(ValueError):
        rep.geometric_grid(1)


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv(rep.THREADS_ENV, "3")
    assert rep.thread_count() == 3
    monkeypatch.setenv(rep.THREADS_ENV, "0")
    assert rep.thread_count() == 1
    monkeypatch.setenv(rep.THREADS_ENV, "garbage")
    assert rep.thread_count() >= 1
    monkeypatch.delenv(rep.THREADS_ENV)
    assert rep.thread_count() >= 1


def test_run_bound_wilkinson_matches_closed_form(closed_form_cache):
    report, _, _, cert = rep.run_bound(25, "wilkinson", certify=True)
    closed = closed_form_cache(25)
    assert report.float_objective == pytest.approx(float(closed.bound), abs=1e-7)
    assert cert.bound == closed.bound
    assert report.verified
    assert report.certified_bound == closed.bound


def test_run_bound_report_invariants():
    report, _, _, _ = rep.run_bound(80, "improved", selector="band", certify=True)
    assert report.certified_bound is not None
    assert float(report.certified_bound) >= report.float_objective - 1e-6
    # monotone nesting: fewer rows can only weaken the bound
    assert report.wilkinson_closed_form >= float(report.certified_bound) - 1e-12
    d = report.as_dict()
    assert d["certified_bound"].count("/") == 1
    assert d["verified"] is True
    assert d["rows"] == report.rows


def test_run_bound_rejects_unknown_program():
    with pytest.raises(ValueError):
        rep.build_instance(5, "nope")


def test_active_constraints_float_mode():
    # the classical dual has full support, so every row is tight at the
    # optimum (the k = 1 row is vacuously tight at 0)
    n = 20
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(n))
    sol = lps.solve_float(lp)
    rec = rep.active_constraints(lp, sol=sol)
    assert {(k, l) for k, l, _ in rec.active} == {(k, 0) for k in range(1, n + 1)}
    assert rec.tolerance_rule.startswith("slack <=")


def test_active_constraints_exact_mode():
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(3))
    rhs2 = lp.rows[1].rhs_upper
    point = [Fraction(rhs2), Fraction(rhs2), Fraction(rhs2)]
    rec = rep.active_constraints(lp, point=point)
    assert rec.tolerance_rule == "slack == 0 (exact)"
    assert {(k, l) for k, l, _ in rec.active} == {(1, 0), (2, 0)}
    assert all(s == 0.0 for _, _, s in rec.active)


def test_active_constraints_requires_point():
    lp = lpm.cumulative_transform(lpm.build_wilkinson_lp(3))
    with pytest.raises(ValueError):
        rep.active_constraints(lp)


def test_active_figure_rows_fields():
    rec, rows, report = rep.active_figure_rows(40, selector="band")
    assert rec.n == 40
    valid = {(r.k, r.l) for r in rep.build_instance(40, "improved", "band").rows}
    assert {(r["k"], r["l"]) for r in rows} <= valid
    assert report.rows == len(valid)


def test_growth_figure_rows_ordering_and_gap():
    rows = rep.growth_figure_rows(60, points=6)
    assert [r["n"] for r in rows] == sorted({r["n"] for r in rows})
    assert rows[0]["n"] == 2 and rows[-1]["n"] == 60
    for r in rows:
        assert r["improved_log_bound"] <= r["wilkinson_log_bound"] + 1e-9
        assert not r["certified"]


def test_growth_figure_certified_rows():
    rows = rep.growth_figure_rows(12, points=3, certify=True)
    assert all(r["certified"] for r in rows)


def test_write_csv_formatting(tmp_path):
    path = tmp_path / "t.csv"
    rep.write_csv(path, ["a", "b", "c"], [{"a": 1, "b": True, "c": 0.1}])
    text = path.read_text()
    assert text == "a,b,c\n1,true,0.1\n"
    # repr keeps float round-trip exact
    rep.write_csv(path, ["x"], [{"x": 1.0000000000000002}])
    assert float(path.read_text().splitlines()[1]) == 1.0000000000000002


def test_svg_outputs_are_deterministic(tmp_path):
    rows = rep.growth_figure_rows(20, points=4)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    rep.save_growth_svg(rows, a)
    rep.save_growth_svg(rows, b)
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert data.lstrip().startswith(b"<?xml")

    rec, _, _ = rep.active_figure_rows(30, selector="band")
    c, d = tmp_path / "c.svg", tmp_path / "d.svg"
    rep.save_active_svg(rec, c)
    rep.save_active_svg(rec, d)
    assert c.read_bytes() == d.read_bytes()


def test_demo_instability_small():
    # 2^49 growth exceeds the 53-bit mantissa once multiplied by the
    # dyadic data, so partial pivoting degrades while complete stays exact
    demo = rep.demo_instability(50, seed=1)
    assert demo.n == 50
    assert demo.relerr_partial > 1e-3
    assert demo.relerr_complete < 1e-12
    assert demo.growth_partial > demo.growth_complete
    assert demo.growth_partial == pytest.approx(2.0 ** 49, rel=1e-12)
    assert len(demo.middle) == 6
    assert demo.middle[0][0] == 50 // 2 - 3 + 1
    d = demo.as_dict()
    assert set(d) == {
        "n", "seed", "relerr_partial", "relerr_complete", "growth_partial",
        "growth_complete", "condition", "middle", "seconds",
    }
    text = demo.text()
    assert "relative error" in text and "condition" in text


def test_demo_instability_deterministic():
    one = rep.demo_instability(24, seed=9).as_dict()
    two = rep.demo_instability(24, seed=9).as_dict()
    one.pop("seconds")
    two.pop("seconds")
    assert one == two
    other = rep.demo_instability(24, seed=10).as_dict()
    assert other["middle"] != one["middle"]


def test_dump_json_format(tmp_path):
    path = tmp_path / "r.json"
    text = rep.dump_json({"b": 1, "a": [1, 2]}, path)
    assert text.endswith("\n")
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(path.read_text()) == {"b": 1, "a": [1, 2]}
