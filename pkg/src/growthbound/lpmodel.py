"""Constraint systems bounding log-pivot vectors q_1..q_n.

Three programs share the same machinery: the classical one (rows indexed by
k alone), its geometric-mean variant (same rows, averaged objective), and
the strengthened one with extra rows indexed by (k, l) pairs.  Rows carry
integer coefficients, a description of the exact transcendental RHS, a
rational upper enclosure of it, and the nearest binary64 value, so the
float solver and the exact certifier consume one instance.

Rows are stored as a prefix length (that many leading +1 coefficients)
plus a sparse correction map; the cumulative change of variables
Q(k) = q_1 + ... + q_k collapses every row to at most 4 nonzeros.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .enclosures import ln_upper

Q_FORM = "q-form"
CUMULATIVE_FORM = "cumulative-Q-form"

SELECTORS = ("full", "wilkinson-only", "band", "diagonal", "band+diagonal", "theorem1")

DEFAULT_BAND_WIDTH = 4
DEFAULT_PRECISION_BITS = 60


@dataclass(frozen=True)
class RhsExpr:
    """(k/2) ln k when improved is False, (k/2) ln(11k/4) when True."""

    k: int
    improved: bool = False

    def argument(self) -> Fraction:
        return Fraction(11 * self.k, 4) if self.improved else Fraction(self.k)

    def value_float(self) -> float:
        if not self.improved and self.k == 1:
            return 0.0
        return 0.5 * self.k * math.log(self.argument())


def rhs_enclosure(expr: RhsExpr, precision_bits: int = DEFAULT_PRECISION_BITS) -> Fraction:
    """Rational r with 0 <= r - value <= 2^-precision_bits * max(1, value)."""
    if expr.k < 1:
        raise ValueError("k >= 1 required")
    if not expr.improved and expr.k == 1:
        return Fraction(0)
    return Fraction(expr.k, 2) * ln_upper(expr.argument(), precision_bits)


@dataclass(frozen=True)
class ConstraintRow:
    """One inequality: sum of the first `prefix` variables, plus the
    corrections in `extra`, is at most the RHS."""

    k: int
    l: int
    prefix: int
    extra: dict
    rhs: RhsExpr
    rhs_upper: Fraction
    rhs_float: float

    def coeff(self, i: int) -> int:
        return (1 if 1 <= i <= self.prefix else 0) + self.extra.get(i, 0)

    def coeffs(self) -> dict:
        out = {i: 1 for i in range(1, self.prefix + 1)}
        for i, c in self.extra.items():
            out[i] = out.get(i, 0) + c
            if out[i] == 0:
                del out[i]
        return out

    def nonzeros(self) -> int:
        return len(self.coeffs())


@dataclass(frozen=True)
class LPInstance:
    n: int
    program: str
    rows: list
    objective: dict
    form: str = Q_FORM
    selector: Optional[str] = None
    band_width: Optional[int] = None
    precision_bits: int = DEFAULT_PRECISION_BITS

    def wilkinson_rows(self):
        return [r for r in self.rows if r.l == 0]

    def improved_rows(self):
        return [r for r in self.rows if r.l > 0]


def _wilkinson_row(k: int, bits: int) -> ConstraintRow:
    expr = RhsExpr(k)
    return ConstraintRow(
        k=k,
        l=0,
        prefix=k,
        extra={k: -k},
        rhs=expr,
        rhs_upper=rhs_enclosure(expr, bits),
        rhs_float=expr.value_float(),
    )


def _improved_row(k: int, l: int, bits: int) -> ConstraintRow:
    expr = RhsExpr(k, improved=True)
    return ConstraintRow(
        k=k,
        l=l,
        prefix=k,
        extra={k: -l, k + l: -(k - l)},
        rhs=expr,
        rhs_upper=rhs_enclosure(expr, bits),
        rhs_float=expr.value_float(),
    )


def build_wilkinson_lp(n: int, precision_bits: int = DEFAULT_PRECISION_BITS) -> LPInstance:
    """Rows k=1..n (the k=1 row is vacuous but keeps indexing aligned);
    objective q_1 - q_n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    rows = [_wilkinson_row(k, precision_bits) for k in range(1, n + 1)]
    objective = {} if n == 1 else {1: Fraction(1), n: Fraction(-1)}
    return LPInstance(n, "wilkinson", rows, objective, precision_bits=precision_bits)


def build_geomean_lp(
    n: int, weights=None, precision_bits: int = DEFAULT_PRECISION_BITS
) -> LPInstance:
    """Same rows as the classical program; objective sum_k w_k (q_1 - q_k)
    with default w_k = 1/n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    if weights is None:
        weights = [Fraction(1, n)] * n
    else:
        weights = [Fraction(w) for w in weights]
        if len(weights) != n:
            raise ValueError("need one weight per variable")
        if any(w < 0 for w in weights):
            raise ValueError("weights must be nonnegative")
    total = sum(weights)
    objective = {1: total - weights[0]}
    for k in range(2, n + 1):
        if weights[k - 1]:
            objective[k] = -weights[k - 1]
    if objective.get(1) == 0:
        del objective[1]
    rows = [_wilkinson_row(k, precision_bits) for k in range(1, n + 1)]
    return LPInstance(n, "geomean", rows, objective, precision_bits=precision_bits)


def improved_pairs(n: int, selector: str, band_width: int = DEFAULT_BAND_WIDTH):
    """Yield the (k, l) pairs a selector keeps, in (k, l) order.

    band keeps k+l within [sqrt(2)k - 1, sqrt(2)k + C]; since sqrt(2)k is
    irrational this is the exact integer range [isqrt(2k^2), isqrt(2k^2)+C].
    theorem1 keeps only k+l = ceil(sqrt(2)k) = isqrt(2k^2) + 1.
    """
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}")
    if band_width < 0:
        raise ValueError("band width must be nonnegative")
    if selector == "wilkinson-only":
        return
    for k in range(2, n):
        lmax = min(k - 1, n - k)
        if lmax < 1:
            continue
        if selector == "full":
            yield from ((k, l) for l in range(1, lmax + 1))
            continue
        keep = set()
        if selector in ("band", "band+diagonal"):
            base = math.isqrt(2 * k * k)
            for s in range(base, base + band_width + 1):
                if 1 <= s - k <= lmax:
                    keep.add(s - k)
        if selector in ("diagonal", "band+diagonal"):
            if 1 <= n - k <= lmax:
                keep.add(n - k)
        if selector == "theorem1":
            l = math.isqrt(2 * k * k) + 1 - k
            if 1 <= l <= lmax:
                keep.add(l)
        yield from ((k, l) for l in sorted(keep))


def build_improved_lp(
    n: int,
    selector: str = "full",
    band_width: int = DEFAULT_BAND_WIDTH,
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> LPInstance:
    """All rows of the classical program plus the selected (k, l) rows;
    objective q_1 - q_n."""
    if n < 1:
        raise ValueError("n >= 1 required")
    rows = [_wilkinson_row(k, precision_bits) for k in range(1, n + 1)]
    rows.extend(
        _improved_row(k, l, precision_bits) for k, l in improved_pairs(n, selector, band_width)
    )
    objective = {} if n == 1 else {1: Fraction(1), n: Fraction(-1)}
    return LPInstance(
        n,
        "improved",
        rows,
        objective,
        selector=selector,
        band_width=band_width if selector in ("band", "band+diagonal") else None,
        precision_bits=precision_bits,
    )


def cumulative_transform(lp: LPInstance) -> LPInstance:
    """Rewrite over Q(k) = q_1 + ... + q_k.  Unimodular, so the optimum is
    unchanged; every row ends up with at most 4 nonzeros."""
    if lp.form != Q_FORM:
        raise ValueError("instance already transformed")
    new_rows = []
    for r in lp.rows:
        extra: dict = {}
        if r.prefix >= 1:
            extra[r.prefix] = extra.get(r.prefix, 0) + 1
        for i, c in r.extra.items():
            # q_i = Q(i) - Q(i-1)
            extra[i] = extra.get(i, 0) + c
            if i - 1 >= 1:
                extra[i - 1] = extra.get(i - 1, 0) - c
        extra = {i: c for i, c in extra.items() if c}
        new_rows.append(
            ConstraintRow(
                k=r.k,
                l=r.l,
                prefix=0,
                extra=extra,
                rhs=r.rhs,
                rhs_upper=r.rhs_upper,
                rhs_float=r.rhs_float,
            )
        )
    objective = {}
    for j in range(1, lp.n + 1):
        c = lp.objective.get(j, Fraction(0)) - lp.objective.get(j + 1, Fraction(0))
        if c:
            objective[j] = c
    return LPInstance(
        lp.n,
        lp.program,
        new_rows,
        objective,
        form=CUMULATIVE_FORM,
        selector=lp.selector,
        band_width=lp.band_width,
        precision_bits=lp.precision_bits,
    )


@dataclass(frozen=True)
class Violation:
    k: int
    l: int
    slack: float


PROGRAMS = ("wilkinson-opt", "improved-opt", "improved-lp")


def check_pivot_feasibility(pivots, program: str, tol: float = 1e-9):
    """Evaluate every constraint of the chosen program at the given pivot
    magnitudes; returns the rows that fail, with their (negative) slack.

    The opt programs are the nonlinear product forms, evaluated in log
    space; improved-lp is the linear system at q_k = ln p_k.
    """
    if program not in PROGRAMS:
        raise ValueError(f"unknown program {program!r}")
    pivots = [float(p) for p in pivots]
    if any(p <= 0 for p in pivots):
        raise ValueError("pivots must be positive")
    n = len(pivots)
    q = [math.log(p) for p in pivots]
    prefix = [0.0]
    for v in q:
        prefix.append(prefix[-1] + v)

    violations = []

    def check(k, l, rhs_log):
        slack = rhs_log - prefix[k]
        if slack < -tol * max(1.0, abs(prefix[k])):
            violations.append(Violation(k, l, slack))

    # all three programs contain the classical rows, in log form they agree
    for k in range(1, n + 1):
        check(k, 0, 0.5 * k * math.log(k) + k * q[k - 1])
    if program == "wilkinson-opt":
        return violations

    for k, l in improved_pairs(n, "full"):
        if program == "improved-lp":
            rhs = 0.5 * k * math.log(0.25 * 11 * k) + l * q[k - 1] + (k - l) * q[k + l - 1]
        else:
            pk, pkl = pivots[k - 1], pivots[k + l - 1]
            rhs = (
                k * math.log(k)
                + (k - l) * math.log(pkl)
                + l * math.log(pk + pkl)
                - 0.5 * (k - l) * math.log(k - l)
                - 0.5 * l * math.log(l)
            )
        check(k, l, rhs)
    return violations


def dump_lp(lp: LPInstance) -> str:
    """Text form: JSON metadata line, then one constraint per line as
    "k l : c*q3 ... <= p/q".  Exact round-trip."""
    var = "Q" if lp.form == CUMULATIVE_FORM else "q"
    meta = {
        "n": lp.n,
        "program": lp.program,
        "form": lp.form,
        "selector": lp.selector,
        "band_width": lp.band_width,
        "precision_bits": lp.precision_bits,
        "objective": {str(i): str(c) for i, c in sorted(lp.objective.items())},
    }
    lines = [json.dumps(meta, sort_keys=True)]
    for r in lp.rows:
        terms = " ".join(f"{c:+d}*{var}{i}" for i, c in sorted(r.coeffs().items()))
        rhs = r.rhs_upper
        lines.append(f"{r.k} {r.l} :{' ' + terms if terms else ''} <= {rhs.numerator}/{rhs.denominator}")
    return "\n".join(lines) + "\n"


def parse_lp(text: str) -> LPInstance:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty LP text")
    meta = json.loads(lines[0])
    form = meta["form"]
    objective = {int(i): Fraction(c) for i, c in meta["objective"].items()}
    rows = []
    for ln in lines[1:]:
        head, rhs_txt = ln.rsplit("<=", 1)
        prov, _, body = head.partition(":")
        k_s, l_s = prov.split()
        k, l = int(k_s), int(l_s)
        coeffs = {}
        for term in body.split():
            c_s, v_s = term.split("*")
            coeffs[int(v_s[1:])] = int(c_s)
        expr = RhsExpr(k, improved=l > 0)
        rows.append(
            ConstraintRow(
                k=k,
                l=l,
                prefix=0,
                extra=coeffs,
                rhs=expr,
                rhs_upper=Fraction(rhs_txt.strip()),
                rhs_float=expr.value_float(),
            )
        )
    return LPInstance(
        meta["n"],
        meta["program"],
        rows,
        objective,
        form=form,
        selector=meta.get("selector"),
        band_width=meta.get("band_width"),
        precision_bits=meta.get("precision_bits", DEFAULT_PRECISION_BITS),
    )


def save_lp(lp: LPInstance, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(dump_lp(lp))


def load_lp(path) -> LPInstance:
    with open(path, "r", encoding="ascii") as fh:
        return parse_lp(fh.read())
