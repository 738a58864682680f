"""Gaussian elimination with pivoting, growth tracking, and linear solves.

The trace of an elimination records, for every step, the pivot and the
largest entry of the trailing submatrix (the iterate).  With sizes indexed
as in the underlying theory, the iterate before step s is the k x k matrix
with k = n - s, its largest entry is written ||A^(k)||_max, and under
complete pivoting the pivot of the step equals that largest entry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .matrix import Matrix
from .scalars import (
    BINARY64_COMPLEX,
    BINARY64_REAL,
    RATIONAL_COMPLEX,
    RATIONAL_REAL,
)

COMPLETE = "complete"
PARTIAL = "partial"
NONE = "none"

STRATEGIES = (COMPLETE, PARTIAL, NONE)


class SingularMatrixError(Exception):
    """Raised when elimination meets a zero pivot; carries the step index."""

    def __init__(self, step: int):
        super().__init__(f"zero pivot at elimination step {step}")
        self.step = step


@dataclass(frozen=True)
class FloatConfig:
    """Floating-point elimination settings.

    mantissa_bits below 53 emulates a shorter significand by rounding after
    every arithmetic operation (to nearest, ties to even).
    """

    mantissa_bits: int = 53

    def __post_init__(self):
        if not 2 <= self.mantissa_bits <= 53:
            raise ValueError("mantissa_bits must be in [2, 53]")


class EliminationTrace:
    """Factorisation record: P_r A P_c = L U plus per-step growth data.

    pivot_values and max_entry_values are in elimination order, so index s
    belongs to the iterate of size n - s.  pivot_magnitude(k) and
    max_entry_magnitude(k) use the size-k indexing instead.
    """

    def __init__(self, original, work_mode, strategy, float_config,
                 row_perm, col_perm, compact, pivot_values, max_entry_values):
        self.original = original
        self.mode = work_mode
        self.strategy = strategy
        self.float_config = float_config
        self.row_perm = row_perm
        self.col_perm = col_perm
        self.compact = compact
        self.pivot_values = pivot_values
        self.max_entry_values = max_entry_values

    @property
    def n(self) -> int:
        return len(self.pivot_values)

    def pivot_magnitude(self, k: int):
        """|p_k|: modulus of the pivot of the k x k iterate."""
        return scalars.magnitude(self.pivot_values[self.n - k], self.mode)

    def max_entry_magnitude(self, k: int):
        """||A^(k)||_max for the k x k iterate."""
        return scalars.magnitude(self.max_entry_values[self.n - k], self.mode)

    def pivot_magnitudes(self) -> list:
        return [scalars.magnitude(v, self.mode) for v in self.pivot_values]

    def max_entry_magnitudes(self) -> list:
        return [scalars.magnitude(v, self.mode) for v in self.max_entry_values]

    def lower(self) -> Matrix:
        n = self.n
        L = Matrix.identity(n, self.mode)
        for i in range(n):
            for j in range(i):
                L.data[i][j] = self.compact.data[i][j]
        return L

    def upper(self) -> Matrix:
        n = self.n
        U = Matrix.zeros(n, n, self.mode)
        for i in range(n):
            for j in range(i, n):
                U.data[i][j] = self.compact.data[i][j]
        return U

    def permuted_original(self) -> Matrix:
        """The input matrix with the trace's row and column permutations applied."""
        src = self.original if self.original.mode == self.mode else _to_work(self.original, self.mode, self.float_config)
        return Matrix(
            [[src.data[self.row_perm[i]][self.col_perm[j]] for j in range(self.n)]
             for i in range(self.n)],
            self.mode,
        )


def wilkinson_matrix(n: int, mode: str = RATIONAL_REAL) -> Matrix:
    """-1 below the diagonal, 1 on the diagonal and in the last column."""
    if n < 1:
        raise ValueError("n must be positive")
    one = scalars.one(mode)
    zero = scalars.zero(mode)
    data = []
    for i in range(n):
        row = []
        for j in range(n):
            if i > j:
                row.append(-one)
            elif i == j or j == n - 1:
                row.append(one)
            else:
                row.append(zero)
        data.append(row)
    return Matrix(data, mode)


def _to_work(m: Matrix, work_mode: str, cfg: FloatConfig | None) -> Matrix:
    out = m if m.mode == work_mode else m.to_float()
    if cfg is not None and cfg.mantissa_bits < 53:
        if work_mode == BINARY64_REAL:
            rb = scalars.round_binary
        else:
            rb = scalars.round_binary_complex
        out = Matrix([[rb(x, cfg.mantissa_bits) for x in row] for row in out.data], work_mode)
    return out


def eliminate(m: Matrix, strategy: str = COMPLETE,
              float_config: FloatConfig | None = None) -> EliminationTrace:
    """LU factorisation with the chosen pivoting strategy.

    Passing a FloatConfig forces binary64 (or reduced-precision) arithmetic
    even on exact input.  Pivot ties are broken by the smallest row index,
    then the smallest column index.
    """
    if not m.is_square():
        raise ValueError("elimination needs a square matrix")
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    n = m.rows
    if n == 0:
        raise ValueError("empty matrix")

    if float_config is not None:
        work_mode = scalars.float_mode_of(m.mode)
    else:
        work_mode = m.mode
    work = _to_work(m, work_mode, float_config)

    if work_mode in (BINARY64_REAL, BINARY64_COMPLEX) and (
            float_config is None or float_config.mantissa_bits == 53):
        row_perm, col_perm, compact, pivots, maxes = _eliminate_np(work, strategy)
    else:
        row_perm, col_perm, compact, pivots, maxes = _eliminate_py(work, strategy, float_config)

    return EliminationTrace(m, work_mode, strategy, float_config,
                            row_perm, col_perm, compact, pivots, maxes)


def _eliminate_py(work: Matrix, strategy: str, cfg: FloatConfig | None):
    n = work.rows
    mode = work.mode
    a = [row[:] for row in work.data]
    row_perm = list(range(n))
    col_perm = list(range(n))
    pivots = []
    maxes = []

    bits = cfg.mantissa_bits if cfg is not None else 53
    exact = scalars.is_exact_mode(mode)
    if exact or bits >= 53:
        rnd = lambda x: x
    elif mode == BINARY64_REAL:
        rnd = lambda x: scalars.round_binary(x, bits)
    else:
        rnd = lambda x: scalars.round_binary_complex(x, bits)

    for s in range(n):
        best = None
        best_ij = (s, s)
        if strategy == COMPLETE:
            for i in range(s, n):
                for j in range(s, n):
                    v = scalars.abs_sq(a[i][j], mode)
                    if best is None or v > best:
                        best, best_ij = v, (i, j)
        elif strategy == PARTIAL:
            for i in range(s, n):
                v = scalars.abs_sq(a[i][s], mode)
                if best is None or v > best:
                    best, best_ij = v, (i, s)
        pi, pj = best_ij
        if strategy != NONE:
            if pi != s:
                a[s], a[pi] = a[pi], a[s]
                row_perm[s], row_perm[pi] = row_perm[pi], row_perm[s]
            if pj != s:
                for row in a:
                    row[s], row[pj] = row[pj], row[s]
                col_perm[s], col_perm[pj] = col_perm[pj], col_perm[s]

        if strategy == COMPLETE:
            maxes.append(a[s][s])
        else:
            mv, mi, mj = None, s, s
            for i in range(s, n):
                for j in range(s, n):
                    v = scalars.abs_sq(a[i][j], mode)
                    if mv is None or v > mv:
                        mv, mi, mj = v, i, j
            maxes.append(a[mi][mj])

        piv = a[s][s]
        if not piv:
            raise SingularMatrixError(s + 1)
        pivots.append(piv)

        for i in range(s + 1, n):
            if not a[i][s]:
                continue
            mult = rnd(a[i][s] / piv)
            a[i][s] = mult
            arow = a[i]
            srow = a[s]
            for j in range(s + 1, n):
                if srow[j]:
                    arow[j] = rnd(arow[j] - rnd(mult * srow[j]))

    compact = Matrix(a, mode)
    return row_perm, col_perm, compact, pivots, maxes


def _eliminate_np(work: Matrix, strategy: str):
    import numpy as np

    n = work.rows
    a = work.to_numpy()
    row_perm = list(range(n))
    col_perm = list(range(n))
    pivots = []
    maxes = []

    for s in range(n):
        sub = np.abs(a[s:, s:])
        if strategy == COMPLETE:
            flat = int(np.argmax(sub))
            pi, pj = s + flat // (n - s), s + flat % (n - s)
        elif strategy == PARTIAL:
            pi, pj = s + int(np.argmax(np.abs(a[s:, s]))), s
        else:
            pi, pj = s, s
        if pi != s:
            a[[s, pi], :] = a[[pi, s], :]
            row_perm[s], row_perm[pi] = row_perm[pi], row_perm[s]
        if pj != s:
            a[:, [s, pj]] = a[:, [pj, s]]
            col_perm[s], col_perm[pj] = col_perm[pj], col_perm[s]

        sub = np.abs(a[s:, s:])
        flat = int(np.argmax(sub))
        maxes.append(complex(a[s + flat // (n - s), s + flat % (n - s)])
                     if np.iscomplexobj(a) else float(a[s + flat // (n - s), s + flat % (n - s)]))

        piv = a[s, s]
        if piv == 0:
            raise SingularMatrixError(s + 1)
        pivots.append(complex(piv) if np.iscomplexobj(a) else float(piv))

        if s + 1 < n:
            mults = a[s + 1:, s] / piv
            a[s + 1:, s + 1:] -= np.outer(mults, a[s, s + 1:])
            a[s + 1:, s] = mults

    compact = Matrix(a.tolist(), work.mode)
    return row_perm, col_perm, compact, pivots, maxes


def growth_factor(trace: EliminationTrace):
    """max_k ||A^(k)||_max / ||A||_max; exact Fraction in rational-real mode."""
    mode = trace.mode
    if mode == RATIONAL_REAL:
        denom = abs(trace.max_entry_values[0])
        return max(abs(v) for v in trace.max_entry_values) / denom
    if mode == RATIONAL_COMPLEX:
        denom = trace.max_entry_values[0].abs_sq()
        peak = max(v.abs_sq() for v in trace.max_entry_values)
        return math.sqrt(float(peak / denom))
    mags = [abs(v) for v in trace.max_entry_values]
    return max(mags) / mags[0]


def solve_linear_system(m: Matrix, b: list, strategy: str = PARTIAL,
                        float_config: FloatConfig | None = None) -> list:
    """Solve A x = b through the pivoted LU factorisation."""
    trace = eliminate(m, strategy, float_config)
    return solve_from_trace(trace, b)


def solve_from_trace(trace: EliminationTrace, b: list) -> list:
    n = trace.n
    if len(b) != n:
        raise ValueError("right-hand side has wrong length")
    mode = trace.mode
    if trace.original.mode != mode:
        b = [scalars.to_float_scalar(x, trace.original.mode) for x in b]
    cfg = trace.float_config
    bits = cfg.mantissa_bits if cfg is not None else 53
    if scalars.is_exact_mode(mode) or bits >= 53:
        rnd = lambda x: x
    elif mode == BINARY64_REAL:
        rnd = lambda x: scalars.round_binary(x, bits)
    else:
        rnd = lambda x: scalars.round_binary_complex(x, bits)

    a = trace.compact.data
    z = [b[trace.row_perm[i]] for i in range(n)]
    for i in range(1, n):
        acc = z[i]
        for j in range(i):
            if a[i][j]:
                acc = rnd(acc - rnd(a[i][j] * z[j]))
        z[i] = acc
    w = [scalars.zero(mode)] * n
    for i in range(n - 1, -1, -1):
        acc = z[i]
        for j in range(i + 1, n):
            if a[i][j]:
                acc = rnd(acc - rnd(a[i][j] * w[j]))
        w[i] = rnd(acc / a[i][i])
    x = [scalars.zero(mode)] * n
    for j in range(n):
        x[trace.col_perm[j]] = w[j]
    return x


def iterate(trace: EliminationTrace, k: int) -> Matrix:
    """Recompute the k x k iterate A^(k) of a recorded elimination.

    A^(n) is the permuted input; smaller iterates are the trailing Schur
    complements, recomputed on demand in the trace's arithmetic.
    """
    n = trace.n
    if not 1 <= k <= n:
        raise ValueError("k out of range")
    work = trace.permuted_original()
    mode = trace.mode
    cfg = trace.float_config
    bits = cfg.mantissa_bits if cfg is not None else 53
    if scalars.is_exact_mode(mode) or bits >= 53:
        rnd = lambda x: x
    elif mode == BINARY64_REAL:
        rnd = lambda x: scalars.round_binary(x, bits)
    else:
        rnd = lambda x: scalars.round_binary_complex(x, bits)

    a = [row[:] for row in work.data]
    for s in range(n - k):
        piv = a[s][s]
        if not piv:
            raise SingularMatrixError(s + 1)
        for i in range(s + 1, n):
            if not a[i][s]:
                continue
            mult = rnd(a[i][s] / piv)
            a[i][s] = mult
            for j in range(s + 1, n):
                if a[s][j]:
                    a[i][j] = rnd(a[i][j] - rnd(mult * a[s][j]))
    return Matrix([row[n - k:] for row in a[n - k:]], mode)
