"""Determinant bounds: Hadamard-type products, singular-value sums, the
low-rank perturbation bound, and the long-range pivot-product bound, plus
the iterate splitting that those bounds are applied to.

Every bound here is validated in the test suite against brute-force exact
determinants; the formulas are evaluated in log space where the raw values
would overflow binary64.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import scalars
from .elimination import EliminationTrace, iterate
from .matrix import Matrix
from .scalars import RATIONAL_COMPLEX, RATIONAL_REAL


class SVDConvergenceError(Exception):
    def __init__(self, residual: float, sweeps: int):
        super().__init__(
            f"Jacobi sweeps did not converge: residual {residual:.3e} after {sweeps} sweeps"
        )
        self.residual = residual
        self.sweeps = sweeps


@dataclass(frozen=True)
class SingularSpectrum:
    values: tuple
    residual: float
    sweeps: int

    def condition(self) -> float:
        if self.values[-1] == 0.0:
            return math.inf
        return self.values[0] / self.values[-1]


def singular_values(m: Matrix, tol: float = 1e-13, max_sweeps: int = 30) -> SingularSpectrum:
    """Singular values by cyclic Jacobi sweeps.

    The sweeps apply plane rotations that diagonalise the Gram matrix from
    both sides; they are carried on the factor itself (one rotation per
    column pair) so small singular values are not squared away.  Complex
    input is embedded as the real matrix [[Re, -Im], [Im, Re]], whose
    spectrum repeats each singular value twice.  Convergence is declared
    when the off-diagonal Frobenius mass of the Gram matrix, scaled back to
    the size of the input, drops below tol * ||A||_F.
    """
    import numpy as np

    if not m.is_square():
        raise ValueError("singular values need a square matrix")
    a = m.to_numpy()
    if np.iscomplexobj(a):
        a = np.block([[a.real, -a.imag], [a.imag, a.real]])
        values, residual, sweeps = _jacobi_real(a, tol, max_sweeps)
        return SingularSpectrum(tuple(values[::2]), residual, sweeps)
    values, residual, sweeps = _jacobi_real(a, tol, max_sweeps)
    return SingularSpectrum(tuple(values), residual, sweeps)


def _jacobi_real(a, tol: float, max_sweeps: int):
    import numpy as np

    n = a.shape[0]
    v = np.array(a, dtype=float, order="F", copy=True)
    norm_f = float(np.linalg.norm(v))
    if norm_f == 0.0:
        return [0.0] * n, 0.0, 0
    # off(G)_F <= tol * ||A||_F^2 is residual <= tol * ||A||_F after rescaling
    thresh = tol * norm_f * norm_f

    def gram_off():
        # norm of the off-diagonal part directly; the difference of the
        # full and diagonal norms cancels catastrophically near convergence
        g = v.T @ v
        od = g - np.diag(np.diag(g))
        return g, float(np.linalg.norm(od))

    for sweep in range(max_sweeps):
        g, off = gram_off()
        if off <= thresh:
            s = np.sqrt(np.maximum(np.diag(g), 0.0))
            return sorted((float(x) for x in s), reverse=True), off / norm_f, sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = float(v[:, p] @ v[:, p])
                aqq = float(v[:, q] @ v[:, q])
                apq = float(v[:, p] @ v[:, q])
                if apq == 0.0 or apq * apq <= 1e-34 * app * aqq:
                    continue
                tau = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, tau) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                vp = c * v[:, p] - s * v[:, q]
                vq = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = vp, vq
    g, off = gram_off()
    if off <= thresh:
        s = np.sqrt(np.maximum(np.diag(g), 0.0))
        return sorted((float(x) for x in s), reverse=True), off / norm_f, max_sweeps
    raise SVDConvergenceError(off / norm_f, max_sweeps)


def hadamard_bound_sq(m: Matrix):
    """Product of squared row norms; |det|^2 never exceeds it.

    Exact (a Fraction) in the rational modes, so the comparison against an
    exact determinant has no tolerance at all.
    """
    if not m.is_square():
        raise ValueError("square matrix required")
    mode = m.mode
    prod = None
    for row in m.data:
        s = scalars.abs_sq(scalars.zero(mode), mode)
        for x in row:
            s += scalars.abs_sq(x, mode)
        prod = s if prod is None else prod * s
    return prod


def hadamard_bound(m: Matrix) -> float:
    return math.sqrt(float(hadamard_bound_sq(m)))


def sv_det_bound(a: Matrix, b: Matrix) -> float:
    """prod_i (sigma_i(A) + sigma_{n-i+1}(B)), an upper bound for |det(A+B)|.

    Pairs the largest singular values of A with the smallest of B.
    """
    if a.rows != b.rows or a.cols != b.cols:
        raise ValueError("shape mismatch")
    sa = singular_values(a).values
    sb = singular_values(b).values
    n = len(sa)
    log_sum = 0.0
    for i in range(n):
        term = sa[i] + sb[n - 1 - i]
        if term == 0.0:
            return 0.0
        log_sum += math.log(term)
    return math.exp(log_sum)


def lowrank_hadamard_rhs(n: int, ell: int, c: float, log: bool = False) -> float:
    """n^n / ((n-ell)^((n-ell)/2) * ell^(ell/2)) * (1+C)^ell, with 0^0 = 1.

    Bounds |det(A+B)| when ||A||_F <= n, ||B||_F <= C n, rank(B) <= ell.
    ell = 0 recovers the plain Hadamard corollary n^(n/2).
    """
    if not 0 <= ell <= n:
        raise ValueError("ell out of range")
    if c < 0:
        raise ValueError("C must be nonnegative")
    val = n * math.log(n)
    if n - ell > 0:
        val -= 0.5 * (n - ell) * math.log(n - ell)
    if ell > 0:
        val -= 0.5 * ell * math.log(ell)
        val += ell * math.log1p(c)
    return val if log else math.exp(val)


def longrange_pivot_rhs(k: int, ell: int, p_k: float, p_kl: float, log: bool = False) -> float:
    """k^k * p_{k+l}^(k-l) * (p_k + p_{k+l})^l / ((k-l)^((k-l)/2) * l^(l/2)).

    Upper bound for the pivot product p_1 ... p_k in terms of two later
    pivots.  Requires 1 <= ell <= k - 1 and positive pivot magnitudes.
    """
    if not 1 <= ell <= k - 1:
        raise ValueError("need 1 <= ell <= k-1")
    p_k = float(p_k)
    p_kl = float(p_kl)
    if p_k <= 0.0 or p_kl <= 0.0:
        raise ValueError("pivot magnitudes must be positive")
    val = k * math.log(k)
    val += (k - ell) * math.log(p_kl)
    val += ell * math.log(p_k + p_kl)
    val -= 0.5 * (k - ell) * math.log(k - ell)
    val -= 0.5 * ell * math.log(ell)
    return val if log else math.exp(val)


@dataclass(frozen=True)
class SplitPair:
    """A^(k) = small + lowrank with rank(lowrank) <= ell.

    small is X - tau Y and lowrank is -(1 - tau) Y, where X is the trailing
    block of the (k+ell) iterate, Y the eliminated cross term, and tau the
    Frobenius projection coefficient of X onto Y.
    """

    small: Matrix
    lowrank: Matrix
    tau: object


def split_iterate(trace: EliminationTrace, k: int, ell: int) -> SplitPair:
    """Split A^(k) against the (k+ell) iterate: X = trailing k x k block,
    Y = N21 N11^{-1} N12, tau = Re<X, Y>_F / ||Y||_F^2.  Exact in the
    rational modes."""
    n = trace.n
    if not (1 <= ell and k >= 1 and k + ell <= n):
        raise ValueError("need k >= 1, ell >= 1, k + ell <= n")
    mode = trace.mode
    big = iterate(trace, k + ell)
    m = k + ell
    n11 = [row[:ell] for row in big.data[:ell]]
    n12 = [row[ell:] for row in big.data[:ell]]
    n21 = [row[:ell] for row in big.data[ell:]]
    x = Matrix([row[ell:] for row in big.data[ell:]], mode)

    z = _solve_block(n11, n12, mode)  # N11^{-1} N12, ell x k
    y = Matrix.zeros(k, k, mode)
    for i in range(k):
        for t in range(ell):
            v = n21[i][t]
            if not v:
                continue
            zr = z[t]
            yrow = y.data[i]
            for j in range(k):
                if zr[j]:
                    yrow[j] = yrow[j] + v * zr[j]

    ynorm = y.frobenius_sq()
    if not ynorm:
        tau = _real_zero(mode)
    else:
        tau = _real_inner(x, y, mode) / ynorm
    small = Matrix(
        [[x.data[i][j] - tau * y.data[i][j] for j in range(k)] for i in range(k)], mode
    )
    one = scalars.one(mode)
    factor = tau - one  # lowrank = (tau - 1) Y so small + lowrank = X - Y
    lowrank = Matrix([[factor * v for v in row] for row in y.data], mode)
    return SplitPair(small, lowrank, tau)


def _real_zero(mode: str):
    return Fraction(0) if scalars.is_exact_mode(mode) else 0.0


def _real_inner(a: Matrix, b: Matrix, mode: str):
    """Re <A, B>_F; exact rational in the rational modes."""
    if mode == RATIONAL_REAL:
        acc = Fraction(0)
        for ra, rb in zip(a.data, b.data):
            for x, y in zip(ra, rb):
                acc += x * y
        return acc
    if mode == RATIONAL_COMPLEX:
        acc = Fraction(0)
        for ra, rb in zip(a.data, b.data):
            for x, y in zip(ra, rb):
                acc += x.re * y.re + x.im * y.im
        return acc
    acc = 0.0
    for ra, rb in zip(a.data, b.data):
        for x, y in zip(ra, rb):
            acc += (x * y.conjugate()).real if isinstance(x, complex) else x * y
    return acc


def _solve_block(n11, n12, mode):
    """Solve N11 Z = N12 by elimination with partial pivoting on abs_sq."""
    ell = len(n11)
    k = len(n12[0]) if n12 else 0
    a = [n11[i][:] + n12[i][:] for i in range(ell)]
    for s in range(ell):
        best, bi = None, s
        for i in range(s, ell):
            v = scalars.abs_sq(a[i][s], mode)
            if best is None or v > best:
                best, bi = v, i
        if bi != s:
            a[s], a[bi] = a[bi], a[s]
        piv = a[s][s]
        if not piv:
            raise ZeroDivisionError("singular leading block in split")
        for i in range(s + 1, ell):
            if not a[i][s]:
                continue
            f = a[i][s] / piv
            for j in range(s, ell + k):
                a[i][j] = a[i][j] - f * a[s][j]
    z = [[scalars.zero(mode)] * k for _ in range(ell)]
    for i in range(ell - 1, -1, -1):
        for j in range(k):
            acc = a[i][ell + j]
            for t in range(i + 1, ell):
                acc = acc - a[i][t] * z[t][j]
            z[i][j] = acc / a[i][i]
    return z


def rank_exact(m: Matrix) -> int:
    """Rank by exact row reduction; rational modes only."""
    if not scalars.is_exact_mode(m.mode):
        raise ValueError("exact rank needs a rational mode")
    a = [row[:] for row in m.data]
    rows, cols = m.rows, m.cols
    rank = 0
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if a[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        piv = a[r][c]
        for i in range(r + 1, rows):
            if a[i][c]:
                f = a[i][c] / piv
                for j in range(c, cols):
                    a[i][j] = a[i][j] - f * a[r][j]
        rank += 1
        r += 1
        if r == rows:
            break
    return rank
