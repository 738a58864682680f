"""Report objects behind the CLI: bound reports, figure data (growth-bound
sweeps and active-constraint scatters), and the pivoting instability demo.

Figure commands write a CSV next to an SVG rendering of the same data.
Output is deterministic: sweeps may solve concurrently but results are
keyed and sorted by n before writing, floats are formatted with repr, and
the SVG backend is salted with timestamps disabled.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import asymptotics, elimination, lpmodel, lpsolve
from .elimination import COMPLETE, PARTIAL, FloatConfig, eliminate, growth_factor, solve_from_trace, wilkinson_matrix
from .matrix import Matrix
from .scalars import RATIONAL_REAL

THREADS_ENV = "GROWTHBOUND_THREADS"


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def geometric_grid(n_max: int, points: int = 40, n_min: int = 2) -> list:
    """Distinct integers from n_min to n_max, geometrically spaced."""
    if n_max < n_min:
        raise ValueError("empty grid")
    if points < 2 or n_min == n_max:
        return sorted({n_min, n_max})
    ratio = (n_max / n_min) ** (1.0 / (points - 1))
    out = {n_min, n_max}
    x = float(n_min)
    for _ in range(points - 1):
        x *= ratio
        out.add(min(n_max, max(n_min, round(x))))
    return sorted(out)


@dataclass
class BoundReport:
    n: int
    program: str
    selector: Optional[str]
    band_width: Optional[int]
    float_objective: float
    certified_bound: Optional[Fraction]
    wilkinson_closed_form: float
    theorem1_value: float
    iterations: int
    rows: int
    seconds: float
    verified: bool = False

    def as_dict(self) -> dict:
        cb = self.certified_bound
        return {
            "n": self.n,
            "program": self.program,
            "selector": self.selector,
            "band_width": self.band_width,
            "float_objective": self.float_objective,
            "certified_bound": None if cb is None else f"{cb.numerator}/{cb.denominator}",
            "certified_bound_float": None if cb is None else float(cb),
            "wilkinson_closed_form": self.wilkinson_closed_form,
            "theorem1_value": self.theorem1_value,
            "iterations": self.iterations,
            "rows": self.rows,
            "seconds": round(self.seconds, 3),
            "verified": self.verified,
        }


def build_instance(n: int, program: str, selector: str = "band",
                   band_width: int = lpmodel.DEFAULT_BAND_WIDTH,
                   precision_bits: int = lpmodel.DEFAULT_PRECISION_BITS) -> lpmodel.LPInstance:
    if program == "wilkinson":
        return lpmodel.build_wilkinson_lp(n, precision_bits)
    if program == "geomean":
        return lpmodel.build_geomean_lp(n, precision_bits=precision_bits)
    if program == "improved":
        return lpmodel.build_improved_lp(n, selector, band_width, precision_bits)
    raise ValueError(f"unknown program {program!r}")


def run_bound(n: int, program: str, selector: str = "band",
              band_width: int = lpmodel.DEFAULT_BAND_WIDTH,
              certify: bool = False,
              precision_bits: int = lpmodel.DEFAULT_PRECISION_BITS):
    """Build, solve, and optionally certify one instance.  Returns
    (report, instance, solution, certificate-or-None)."""
    t0 = time.perf_counter()
    lp = build_instance(n, program, selector, band_width, precision_bits)
    work = lpmodel.cumulative_transform(lp)
    sol = lpsolve.solve_float(work)
    if sol.status != lpsolve.STATUS_OPTIMAL:
        raise lpsolve.SolverError(f"solve ended with status {sol.status}")
    cert = None
    if certify:
        cert = lpsolve.certify(work, sol)
    report = BoundReport(
        n=n,
        program=program,
        selector=lp.selector,
        band_width=lp.band_width,
        float_objective=sol.objective_value,
        certified_bound=cert.bound if cert is not None and cert.verified else None,
        wilkinson_closed_form=asymptotics.wilkinson_bound_closed_form(n)[0],
        theorem1_value=asymptotics.theorem1_bound(n),
        iterations=sol.iterations,
        rows=len(lp.rows),
        seconds=time.perf_counter() - t0,
        verified=bool(cert is not None and cert.verified),
    )
    return report, work, sol, cert


@dataclass
class ActiveConstraintRecord:
    n: int
    selector: Optional[str]
    tolerance_rule: str
    active: list = field(default_factory=list)  # (k, l, slack)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "selector": self.selector,
            "tolerance_rule": self.tolerance_rule,
            "active": [[k, l, s] for k, l, s in self.active],
        }


def active_constraints(lp: lpmodel.LPInstance, point=None,
                       sol: Optional[lpsolve.PrimalDualSolution] = None) -> ActiveConstraintRecord:
    """Rows whose slack at the solved point is within the solver's
    feasibility tolerance of zero.

    A rational point (list of Fractions) switches to exact arithmetic
    against the upward-rounded right-hand sides, with zero tolerance.
    """
    if point is None:
        if sol is None:
            raise ValueError("need a primal point or a solution")
        point = sol.primal
    work = lp if lp.form == lpmodel.CUMULATIVE_FORM else lpmodel.cumulative_transform(lp)
    qcum = point if lp.form == lpmodel.CUMULATIVE_FORM else _cumulate(point)
    exact = all(isinstance(v, Fraction) for v in qcum)
    rule = "slack == 0 (exact)" if exact else "slack <= 1e-7*(1+|rhs|)"
    rec = ActiveConstraintRecord(lp.n, lp.selector, rule)
    for r in work.rows:
        if exact:
            lhs = sum(Fraction(c) * qcum[i - 1] for i, c in r.extra.items())
            slack = r.rhs_upper - lhs
            if slack == 0:
                rec.active.append((r.k, r.l, 0.0))
        else:
            lhs = sum(c * qcum[i - 1] for i, c in r.extra.items())
            slack = r.rhs_float - lhs
            if slack <= 1e-7 * (1.0 + abs(r.rhs_float)):
                rec.active.append((r.k, r.l, slack))
    return rec


def _cumulate(q) -> list:
    out = []
    s = None
    for v in q:
        s = v if s is None else s + v
        out.append(s)
    return out


def growth_figure_rows(n_max: int, points: int = 40, selector: str = "band",
                       band_width: int = lpmodel.DEFAULT_BAND_WIDTH,
                       certify: bool = False) -> list:
    """Per-n comparison data: classical closed form, improved LP optimum,
    and the explicit theorem curve."""
    if n_max < 2:
        raise ValueError("n_max >= 2 required")
    grid = geometric_grid(n_max, points)

    def one(n: int) -> dict:
        report, _, _, cert = run_bound(n, "improved", selector, band_width, certify)
        improved = report.float_objective
        if cert is not None and cert.verified:
            improved = float(cert.bound)
        return {
            "n": n,
            "wilkinson_log_bound": report.wilkinson_closed_form,
            "improved_log_bound": improved,
            "theorem1_log_bound": report.theorem1_value,
            "certified": bool(cert is not None and cert.verified),
        }

    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        rows = list(pool.map(one, grid))
    return sorted(rows, key=lambda r: r["n"])


GROWTH_FIELDS = ["n", "wilkinson_log_bound", "improved_log_bound", "theorem1_log_bound", "certified"]


def _format_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, fieldnames, rows) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(fieldnames)
        for r in rows:
            w.writerow([_format_cell(r[k]) for k in fieldnames])


def _svg_figure():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "growthbound"
    return plt


def save_growth_svg(rows, path) -> None:
    plt = _svg_figure()
    ns = [r["n"] for r in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(ns, [r["wilkinson_log_bound"] for r in rows], label="classical bound", color="tab:blue")
    ax.plot(ns, [r["improved_log_bound"] for r in rows], label="improved LP", color="tab:red")
    ax.plot(ns, [r["theorem1_log_bound"] for r in rows], label="explicit curve", color="tab:green", linestyle="--")
    ax.set_xscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("log growth bound")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


ACTIVE_FIELDS = ["k", "l", "slack"]


def active_figure_rows(n: int, selector: str = "band",
                       band_width: int = lpmodel.DEFAULT_BAND_WIDTH):
    report, work, sol, _ = run_bound(n, "improved", selector, band_width)
    rec = active_constraints(work, sol=sol)
    rows = [{"k": k, "l": l, "slack": s} for k, l, s in rec.active]
    return rec, rows, report


def save_active_svg(rec: ActiveConstraintRecord, path) -> None:
    plt = _svg_figure()
    n = rec.n
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    ks = [k for k, l, _ in rec.active]
    ls = [l for k, l, _ in rec.active]
    ax.scatter(ks, ls, s=8, color="black", label="active rows", zorder=3)
    xs = list(range(2, n))
    ax.plot(xs, [(math.sqrt(2.0) - 1.0) * x for x in xs], color="tab:red", label="k+l = sqrt(2) k")
    ax.plot(xs, [n - x for x in xs], color="tab:purple", label="k+l = n")
    ax.set_xlim(0, n)
    ax.set_ylim(-1, n // 2 + 2)
    ax.set_xlabel("k")
    ax.set_ylabel("l")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


@dataclass
class InstabilityDemo:
    n: int
    seed: int
    relerr_partial: float
    relerr_complete: float
    growth_partial: float
    growth_complete: float
    condition: float
    middle: list  # (index, exact, partial, complete)
    seconds: float

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "relerr_partial": self.relerr_partial,
            "relerr_complete": self.relerr_complete,
            "growth_partial": self.growth_partial,
            "growth_complete": self.growth_complete,
            "condition": self.condition,
            "middle": [[i, e, p, c] for i, e, p, c in self.middle],
            "seconds": round(self.seconds, 3),
        }

    def text(self) -> str:
        out = io.StringIO()
        w = out.write
        w(f"worst-case elimination matrix, n = {self.n}, seed = {self.seed}\n")
        w(f"2-norm condition estimate: {self.condition:.4f}\n\n")
        w(f"{'i':>5}  {'exact x_i':>24}  {'partial pivoting':>24}  {'complete pivoting':>24}\n")
        for i, e, p, c in self.middle:
            w(f"{i:>5}  {e:>24.16g}  {p:>24.16g}  {c:>24.16g}\n")
        w("\n")
        w(f"relative error, partial pivoting:  {self.relerr_partial:.3e}\n")
        w(f"relative error, complete pivoting: {self.relerr_complete:.3e}\n")
        w(f"growth factor, partial pivoting:   {self.growth_partial:.6g}\n")
        w(f"growth factor, complete pivoting:  {self.growth_complete:.6g}\n")
        return out.getvalue()


def _solve_exact(rows, b):
    """Rational Gaussian elimination with partial pivoting on gmpy2
    scalars; Fraction arithmetic is too slow for the demo's time budget."""
    from gmpy2 import mpq

    n = len(b)
    a = [[mpq(x) for x in row] + [mpq(x)] for row, x in zip(rows, b)]
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(a[i][k]))
        if a[piv][k] == 0:
            raise elimination.SingularMatrixError(k)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
        rk = a[k]
        for i in range(k + 1, n):
            m = a[i][k] / rk[k]
            if m == 0:
                continue
            ri = a[i]
            for j in range(k + 1, n + 1):
                ri[j] -= m * rk[j]
    x = [mpq(0)] * n
    for k in range(n - 1, -1, -1):
        s = a[k][n] - sum(a[k][j] * x[j] for j in range(k + 1, n))
        x[k] = s / a[k][k]
    return [Fraction(v.numerator, v.denominator) for v in x]


def demo_instability(n: int = 100, seed: int = 0) -> InstabilityDemo:
    """Solve Ax = b for the classic worst-case matrix at binary64 under
    both pivoting strategies and compare against the exact solution.

    x is drawn on a dyadic grid so b = Ax is exact in binary64; any error
    in the solves is elimination error alone.
    """
    import random

    from .detbounds import singular_values

    t0 = time.perf_counter()
    rng = random.Random(seed)
    a_exact = wilkinson_matrix(n, RATIONAL_REAL)
    x_true = [Fraction(rng.randrange(-1024, 1025), 1024) for _ in range(n)]
    b_exact = []
    for i in range(n):
        row = a_exact.data[i]
        b_exact.append(sum(row[j] * x_true[j] for j in range(n)))
    x_exact = _solve_exact(a_exact.data, b_exact)
    if x_exact != x_true:
        raise AssertionError("exact solve disagrees with the constructed solution")

    a_float = a_exact.to_float()
    b_float = [float(v) for v in b_exact]

    results = {}
    growths = {}
    for strategy in (PARTIAL, COMPLETE):
        trace = eliminate(a_float, strategy=strategy, float_config=FloatConfig(53))
        results[strategy] = solve_from_trace(trace, b_float)
        growths[strategy] = float(growth_factor(trace))

    def relerr(x):
        num = max(abs(float(xi) - float(ei)) for xi, ei in zip(x, x_exact))
        den = max(abs(float(ei)) for ei in x_exact)
        return num / den

    lo = max(0, n // 2 - 3)
    middle = [
        (
            i + 1,
            float(x_exact[i]),
            float(results[PARTIAL][i]),
            float(results[COMPLETE][i]),
        )
        for i in range(lo, min(n, lo + 6))
    ]
    cond = singular_values(a_float).condition()
    return InstabilityDemo(
        n=n,
        seed=seed,
        relerr_partial=relerr(results[PARTIAL]),
        relerr_complete=relerr(results[COMPLETE]),
        growth_partial=growths[PARTIAL],
        growth_complete=growths[COMPLETE],
        condition=cond,
        middle=middle,
        seconds=time.perf_counter() - t0,
    )


def dump_json(obj, path=None) -> str:
    text = json.dumps(obj, indent=1, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    return text
