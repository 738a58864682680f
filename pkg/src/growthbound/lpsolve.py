"""LP solving and rational certification.

The instances built by lpmodel are maximizations over free variables, so
we work on the dual throughout: min b^T y, A^T y = d, y >= 0, where b is
the RHS vector and d the objective.  In cumulative-Q coordinates A^T is
very sparse and every row of A is orthogonal to (1, 2, ..., n), which
makes one dual equation redundant; dropping it leaves a square system
whose classical rows (k, 0), k = 2..n, form a feasible starting basis for
any of the builder objectives.  No phase 1 is ever needed.

Certification re-solves the final basis system in exact rational
arithmetic and verifies, over all n equations of the instance including
the dropped one, that the multipliers are nonnegative and reproduce the
objective vector exactly.  The reported bound is assembled from the
rational RHS enclosures, never from floats.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from gmpy2 import mpq

from .lpmodel import (
    CUMULATIVE_FORM,
    DEFAULT_BAND_WIDTH,
    DEFAULT_PRECISION_BITS,
    Q_FORM,
    LPInstance,
    build_geomean_lp,
    build_improved_lp,
    build_wilkinson_lp,
    cumulative_transform,
)

STATUS_OPTIMAL = "optimal"
STATUS_UNBOUNDED = "unbounded"
STATUS_INFEASIBLE = "infeasible"
STATUS_ITERATION_LIMIT = "iteration-limit"

EXACT_SIMPLEX_ROW_GUARD = 50000


class SolverError(Exception):
    pass


class CertificationError(Exception):
    pass


@dataclass
class PrimalDualSolution:
    primal: list
    dual: list
    objective_value: float
    basis: list
    status: str
    iterations: int = 0


@dataclass
class CertifiedBound:
    bound: Optional[Fraction]
    dual_multipliers: dict
    verified: bool
    method: str
    optimal: bool = False
    detail: str = ""


def _as_cumulative(lp: LPInstance) -> LPInstance:
    return cumulative_transform(lp) if lp.form == Q_FORM else lp


def _full_objective(lp: LPInstance) -> dict:
    """Objective over Q(1)..Q(n) as Fractions, zero entries omitted."""
    return dict(lp.objective)


def _dropped_objective(lp: LPInstance) -> list:
    """Dense d over equations Q(1)..Q(n-1); the Q(n) equation is implied."""
    n = lp.n
    d = [Fraction(0)] * (n - 1)
    for j, c in lp.objective.items():
        if j <= n - 1:
            d[j - 1] = c
    return d


def _column_dicts(lp: LPInstance):
    """Each row's Q-form coefficients restricted to equations 1..n-1,
    keyed by 0-based equation index."""
    n = lp.n
    cols = []
    for r in lp.rows:
        cols.append({i - 1: c for i, c in r.extra.items() if 1 <= i <= n - 1})
    return cols


def _starting_basis(lp: LPInstance) -> list:
    by_prov = {(r.k, r.l): idx for idx, r in enumerate(lp.rows)}
    basis = []
    for k in range(2, lp.n + 1):
        idx = by_prov.get((k, 0))
        if idx is None:
            raise SolverError("instance lacks the classical rows needed to start")
        basis.append(idx)
    return basis


def solve_float(lp: LPInstance, max_iterations: Optional[int] = None) -> PrimalDualSolution:
    """Revised simplex on the dual standard form.

    Entering column: most negative reduced cost scaled by static column
    norm; falls back to lowest-index (Bland) after a stall, which rules
    out cycling.  Refactorizes the basis every iteration; the bases stay
    well conditioned and sparse here, so this is cheap and keeps the
    iteration exact to rounding.
    """
    import numpy as np
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    work = _as_cumulative(lp)
    n = work.n
    m = len(work.rows)
    if n == 1:
        return PrimalDualSolution([0.0], [0.0] * m, 0.0, [], STATUS_OPTIMAL, 0)

    cols = _column_dicts(work)
    b = np.array([r.rhs_float for r in work.rows])
    data, ri, ci = [], [], []
    for j, cd in enumerate(cols):
        for i, v in cd.items():
            ri.append(i)
            ci.append(j)
            data.append(float(v))
    E = sp.csc_matrix((data, (ri, ci)), shape=(n - 1, m))
    d = np.array([float(x) for x in _dropped_objective(work)])

    basis = _starting_basis(work)
    colnorm = np.sqrt(np.asarray(E.multiply(E).sum(axis=0))).ravel() + 1e-30
    limit = max_iterations if max_iterations is not None else 20 * m + 10000
    bland = False
    best_obj = math.inf
    stall = 0
    it = 0
    while True:
        it += 1
        if it > limit:
            return PrimalDualSolution([], [], math.nan, basis, STATUS_ITERATION_LIMIT, it)
        B = E[:, basis].tocsc()
        lu = spla.splu(B)
        y_B = lu.solve(d)
        if it == 1 and y_B.min() < -1e-9 * (1.0 + float(np.abs(d).max() or 1.0)):
            raise SolverError("starting basis infeasible for this objective")
        pi = lu.solve(b[basis], trans="T")
        r = b - E.T.dot(pi)
        r[basis] = 0.0
        tol = 1e-9 * (1.0 + np.abs(b))
        cand = np.where(r < -tol)[0]
        if len(cand) == 0:
            obj = float(b[basis] @ y_B)
            primal_q = _primal_from_pi(lp, pi)
            dual = [0.0] * m
            for pos, j in enumerate(basis):
                dual[j] = float(y_B[pos])
            return PrimalDualSolution(primal_q, dual, obj, list(basis), STATUS_OPTIMAL, it)
        # a stall is a run of exactly non-improving (degenerate) steps;
        # productive micro-steps must not trip the fallback
        obj = float(b[basis] @ y_B)
        if obj < best_obj:
            best_obj = obj
            stall = 0
            bland = False
        else:
            stall += 1
            if stall > 50:
                bland = True
        if bland:
            j = int(cand.min())
        else:
            j = int(cand[np.argmin(r[cand] / colnorm[cand])])
        w = lu.solve(E[:, j].toarray().ravel())
        pos = np.where(w > 1e-11)[0]
        if len(pos) == 0:
            # dual objective decreases forever: the primal side is infeasible
            return PrimalDualSolution([], [], math.nan, basis, STATUS_INFEASIBLE, it)
        # roundoff may leave tiny negative basics; clamping them to a zero
        # ratio forces degenerate creep, so keep the raw values
        ratios = y_B[pos] / w[pos]
        rmin = ratios.min()
        ties = pos[ratios == rmin]
        leave = min(ties, key=lambda i: basis[i])
        basis[leave] = j


def _primal_from_pi(lp: LPInstance, pi) -> list:
    """Simplex multipliers are the primal point: Q(j) = pi_j, Q(n) = 0.
    Mapped back to q when the caller's instance was in q-form."""
    n = lp.n
    q_cum = [float(pi[j]) for j in range(n - 1)] + [0.0]
    if lp.form == CUMULATIVE_FORM:
        return q_cum
    out = [q_cum[0]]
    for j in range(1, n):
        out.append(q_cum[j] - q_cum[j - 1])
    return out


def _to_mpq(x) -> mpq:
    return mpq(x.numerator, x.denominator)


def _to_frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _exact_sparse_solve(cols, rhs, size):
    """Solve B x = rhs exactly, B given as column dicts of integers.

    Plain elimination with Markowitz pivoting on a dict-of-dicts layout;
    fill stays tiny on the near-bidiagonal bases that show up here.
    Raises SolverError on a singular system.
    """
    rows = [dict() for _ in range(size)]
    for j, cd in enumerate(cols):
        for i, v in cd.items():
            if v:
                rows[i][j] = mpq(v)
    vec = [_to_mpq(x) if isinstance(x, Fraction) else mpq(x) for x in rhs]
    colrows = [set() for _ in range(size)]
    for i in range(size):
        for j in rows[i]:
            colrows[j].add(i)
    rowlive = set(range(size))
    order = []
    while rowlive:
        # Markowitz score (nnz_row - 1) * (nnz_col - 1); the column index
        # drops retired rows eagerly, so len(colrows[j]) is the live count
        best = None
        for i in rowlive:
            ri = rows[i]
            if not ri:
                raise SolverError("singular basis in exact solve")
            li = len(ri) - 1
            for j in ri:
                sc = li * (len(colrows[j]) - 1)
                if best is None or sc < best[0]:
                    best = (sc, i, j)
            if best[0] == 0:
                break
        _, pi_, pj = best
        piv = rows[pi_][pj]
        order.append((pi_, pj))
        rowlive.discard(pi_)
        for j2 in rows[pi_]:
            colrows[j2].discard(pi_)
        for i2 in list(colrows[pj]):
            f = rows[i2][pj] / piv
            for j2, v in rows[pi_].items():
                if j2 == pj:
                    continue
                nv = rows[i2].get(j2, 0) - f * v
                if nv == 0:
                    if j2 in rows[i2]:
                        del rows[i2][j2]
                        colrows[j2].discard(i2)
                else:
                    if j2 not in rows[i2]:
                        colrows[j2].add(i2)
                    rows[i2][j2] = nv
            del rows[i2][pj]
            colrows[pj].discard(i2)
            vec[i2] = vec[i2] - f * vec[pi_]
    x = [mpq(0)] * size
    for i, j in reversed(order):
        s = vec[i]
        for j2, v in rows[i].items():
            if j2 != j:
                s -= v * x[j2]
        x[j] = s / rows[i][j]
    return x


def verify_multipliers(lp: LPInstance, multipliers: dict):
    """Exact check that a sparse multiplier assignment (row index -> value)
    is dual feasible, over all n equations.  Returns (ok, bound, detail);
    bound is the exact rational combination of the RHS enclosures."""
    work = _as_cumulative(lp)
    combo: dict = {}
    bound = mpq(0)
    for idx, y in multipliers.items():
        yq = _to_mpq(Fraction(y))
        if yq < 0:
            return False, None, f"negative multiplier on row {idx}"
        if yq == 0:
            continue
        row = work.rows[idx]
        for i, c in row.extra.items():
            combo[i] = combo.get(i, mpq(0)) + yq * c
        bound += yq * _to_mpq(row.rhs_upper)
    objective = _full_objective(work)
    for i in range(1, work.n + 1):
        want = _to_mpq(objective.get(i, Fraction(0)))
        got = combo.get(i, mpq(0))
        if got != want:
            return False, None, f"objective mismatch at equation {i}"
    for i, v in combo.items():
        if i < 1 or i > work.n:
            if v != 0:
                return False, None, f"stray coefficient at equation {i}"
    return True, _to_frac(bound), ""


def certify(lp: LPInstance, sol: PrimalDualSolution, polish: bool = True,
            polish_cap: int = 500) -> CertifiedBound:
    """Recover exact duals from the float-optimal basis and verify them.

    When polish is on, exact reduced costs are scanned and any stray
    negative one is pivoted away with Bland's rule, so a successful result
    is the exact optimum of the instance with rhs-upper costs, not just a
    valid bound.
    """
    if sol.status != STATUS_OPTIMAL:
        raise CertificationError("can only certify an optimal solve")
    work = _as_cumulative(lp)
    n = work.n
    if n == 1:
        return CertifiedBound(Fraction(0), {}, True, "basis-refactor", True)
    cols = _column_dicts(work)
    b_upper = [r.rhs_upper for r in work.rows]
    d = _dropped_objective(work)
    basis = list(sol.basis)

    try:
        basis, y_B, optimal = _exact_optimize(work, cols, b_upper, d, basis, polish, polish_cap)
    except SolverError as exc:
        return CertifiedBound(None, {}, False, "basis-refactor", False, str(exc))
    multipliers = {j: _to_frac(y) for j, y in zip(basis, y_B) if y != 0}
    ok, bound, detail = verify_multipliers(lp, multipliers)
    if not ok:
        return CertifiedBound(None, {}, False, "basis-refactor", False, detail)
    return CertifiedBound(bound, multipliers, True, "basis-refactor", optimal)


def _exact_optimize(work, cols, b_upper, d, basis, polish, cap):
    """Exact simplex pivots from a given basis until the basic duals are
    nonnegative and (with polish) reduced costs are too.  Returns
    (basis, y_B, optimal) or None if the budget ran out."""
    size = work.n - 1
    m = len(work.rows)
    bq = [_to_mpq(x) for x in b_upper]
    pivots = 0
    while True:
        y_B = _exact_sparse_solve([cols[j] for j in basis], d, size)
        neg = [pos for pos, y in enumerate(y_B) if y < 0]
        if neg:
            # the float basis missed feasibility; restart from the classical
            # basis and walk to optimality with Bland's rule
            if pivots or basis != _starting_basis(work):
                basis = _starting_basis(work)
                continue
            raise SolverError("classical starting basis infeasible")
        if not polish:
            return basis, y_B, False
        basis_cols = [cols[j] for j in basis]
        pi = _exact_sparse_solve_transposed(basis_cols, [bq[j] for j in basis], size)
        in_basis = set(basis)
        enter = None
        for j in range(m):
            if j in in_basis:
                continue
            rc = bq[j]
            for i, c in cols[j].items():
                rc -= c * pi[i]
            if rc < 0:
                enter = j
                break
        if enter is None:
            return basis, y_B, True
        if pivots >= cap:
            return basis, y_B, False
        w = _exact_sparse_solve(basis_cols, _dense_col(cols[enter], size), size)
        leave = None
        best = None
        for pos in range(size):
            if w[pos] > 0:
                ratio = y_B[pos] / w[pos]
                if best is None or ratio < best or (ratio == best and basis[pos] < basis[leave]):
                    best = ratio
                    leave = pos
        if leave is None:
            raise SolverError("exact ratio test found no pivot")
        basis[leave] = enter
        pivots += 1


def _dense_col(cd, size):
    out = [Fraction(0)] * size
    for i, v in cd.items():
        out[i] = Fraction(v)
    return out


def _exact_sparse_solve_transposed(cols, rhs, size):
    """Solve B^T pi = rhs exactly (B given as column dicts)."""
    rows_t = [dict(cd) for cd in cols]  # row i of B^T is column i of B
    trans_cols = [dict() for _ in range(size)]
    for i, rd in enumerate(rows_t):
        for j, v in rd.items():
            trans_cols[j][i] = v
    return _exact_sparse_solve(trans_cols, rhs, size)


def exact_simplex(lp: LPInstance) -> CertifiedBound:
    """Ground-truth exact solve: Bland's rule from the classical basis,
    every quantity rational, costs taken from rhs-upper."""
    if len(lp.rows) > EXACT_SIMPLEX_ROW_GUARD:
        raise SolverError(f"instance exceeds {EXACT_SIMPLEX_ROW_GUARD} rows")
    work = _as_cumulative(lp)
    n = work.n
    if n == 1:
        return CertifiedBound(Fraction(0), {}, True, "exact-simplex", True)
    cols = _column_dicts(work)
    b_upper = [r.rhs_upper for r in work.rows]
    d = _dropped_objective(work)
    basis = _starting_basis(work)
    basis, y_B, optimal = _exact_optimize(work, cols, b_upper, d, basis, True, 10 * len(work.rows))
    if not optimal:
        raise SolverError("exact simplex stopped before optimality")
    multipliers = {j: _to_frac(y) for j, y in zip(basis, y_B) if y != 0}
    ok, bound, detail = verify_multipliers(lp, multipliers)
    if not ok:
        raise SolverError(f"exact simplex produced an invalid certificate: {detail}")
    return CertifiedBound(bound, multipliers, True, "exact-simplex", True)


def wilkinson_closed_form_dual(
    n: int, objective: str = "head-tail",
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> CertifiedBound:
    """The known optimal multipliers for the classical program, assembled
    and verified exactly.

    head-tail: y_k = 1/((k-1)k) for k = 2..n-1 and y_n = 1/(n-1);
    geomean:   y_k = 1/((k-1)k) for k = 2..n.
    """
    if n < 2:
        raise ValueError("closed form needs n >= 2")
    if objective == "head-tail":
        lp = build_wilkinson_lp(n, precision_bits)
        y = {k: Fraction(1, (k - 1) * k) for k in range(2, n)}
        y[n] = Fraction(1, n - 1)
    elif objective == "geomean":
        lp = build_geomean_lp(n, precision_bits=precision_bits)
        y = {k: Fraction(1, (k - 1) * k) for k in range(2, n + 1)}
    else:
        raise ValueError(f"unknown objective {objective!r}")
    by_prov = {(r.k, r.l): idx for idx, r in enumerate(lp.rows)}
    multipliers = {by_prov[(k, 0)]: v for k, v in y.items()}
    ok, bound, detail = verify_multipliers(lp, multipliers)
    if not ok:
        raise CertificationError(f"closed-form dual failed verification: {detail}")
    return CertifiedBound(bound, multipliers, True, "closed-form", True)


def wilkinson_primal_point(n: int) -> list:
    """q making every classical row tight: q_1 = 0 and
    q_k = (S_{k-1} - (k/2) ln k) / (k - 1)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    q = [0.0]
    s = 0.0
    for k in range(2, n + 1):
        qk = (s - 0.5 * k * math.log(k)) / (k - 1)
        q.append(qk)
        s += qk
    return q


def certificate_payload(lp: LPInstance, cb: CertifiedBound) -> dict:
    if not cb.verified or cb.bound is None:
        raise CertificationError("only verified bounds can be exported")
    mults = []
    for idx in sorted(cb.dual_multipliers):
        r = lp.rows[idx]
        v = cb.dual_multipliers[idx]
        mults.append([r.k, r.l, f"{v.numerator}/{v.denominator}"])
    return {
        "n": lp.n,
        "program": lp.program,
        "selector": lp.selector,
        "band_width": lp.band_width,
        "precision_bits": lp.precision_bits,
        "multipliers": mults,
        "bound": f"{cb.bound.numerator}/{cb.bound.denominator}",
        "verified": True,
    }


def save_certificate(lp: LPInstance, cb: CertifiedBound, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(certificate_payload(lp, cb), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_certificate(path) -> dict:
    with open(path, "r", encoding="ascii") as fh:
        return json.load(fh)


def rebuild_instance(payload: dict) -> LPInstance:
    n = payload["n"]
    program = payload["program"]
    bits = payload.get("precision_bits", DEFAULT_PRECISION_BITS)
    if program == "wilkinson":
        return build_wilkinson_lp(n, bits)
    if program == "geomean":
        return build_geomean_lp(n, precision_bits=bits)
    if program == "improved":
        return build_improved_lp(
            n,
            payload.get("selector") or "full",
            payload.get("band_width") or DEFAULT_BAND_WIDTH,
            bits,
        )
    raise ValueError(f"unknown program {program!r}")


def verify_certificate(payload: dict):
    """Rebuild the instance from the metadata alone and recheck every part
    of the certificate.  Returns (ok, detail)."""
    try:
        lp = rebuild_instance(payload)
    except (KeyError, ValueError, TypeError) as exc:
        return False, f"malformed certificate: {exc}"
    by_prov = {(r.k, r.l): idx for idx, r in enumerate(lp.rows)}
    multipliers = {}
    try:
        for k, l, val in payload["multipliers"]:
            idx = by_prov.get((k, l))
            if idx is None:
                return False, f"certificate references unknown row ({k}, {l})"
            multipliers[idx] = Fraction(val)
        claimed = Fraction(payload["bound"])
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        return False, f"malformed certificate: {exc}"
    ok, bound, detail = verify_multipliers(lp, multipliers)
    if not ok:
        return False, detail
    if bound != claimed:
        return False, "stated bound does not match the multipliers"
    return True, ""
