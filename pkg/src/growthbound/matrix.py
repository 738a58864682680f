"""Dense matrices over the supported scalar modes, with file round-trip
and two independent exact determinant routines used as test oracles."""
from __future__ import annotations

import random
from fractions import Fraction

from . import scalars
from .scalars import (
    BINARY64_COMPLEX,
    BINARY64_REAL,
    MODES,
    QComplex,
    RATIONAL_COMPLEX,
    RATIONAL_REAL,
)


class Matrix:
    """Row-major dense matrix.  ``data`` holds rows of mode scalars."""

    __slots__ = ("rows", "cols", "mode", "data")

    def __init__(self, data, mode: str):
        if mode not in MODES:
            raise ValueError(f"unknown scalar mode {mode!r}")
        self.data = [list(row) for row in data]
        self.rows = len(self.data)
        self.cols = len(self.data[0]) if self.data else 0
        if any(len(row) != self.cols for row in self.data):
            raise ValueError("ragged rows")
        self.mode = mode

    @classmethod
    def zeros(cls, rows: int, cols: int, mode: str = RATIONAL_REAL) -> "Matrix":
        z = scalars.zero(mode)
        return cls([[z] * cols for _ in range(rows)], mode)

    @classmethod
    def identity(cls, n: int, mode: str = RATIONAL_REAL) -> "Matrix":
        m = cls.zeros(n, n, mode)
        o = scalars.one(mode)
        for i in range(n):
            m.data[i][i] = o
        return m

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.mode == other.mode
            and self.data == other.data
        )

    def copy(self) -> "Matrix":
        return Matrix(self.data, self.mode)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def to_float(self) -> "Matrix":
        fm = scalars.float_mode_of(self.mode)
        return Matrix(
            [[scalars.to_float_scalar(x, self.mode) for x in row] for row in self.data],
            fm,
        )

    def to_numpy(self):
        import numpy as np

        dtype = complex if scalars.float_mode_of(self.mode) == BINARY64_COMPLEX else float
        return np.array(
            [[scalars.to_float_scalar(x, self.mode) for x in row] for row in self.data],
            dtype=dtype,
        )

    def frobenius_sq(self):
        """Sum of squared entry moduli; exact in rational modes."""
        total = scalars.abs_sq(scalars.zero(self.mode), self.mode)
        for row in self.data:
            for x in row:
                total += scalars.abs_sq(x, self.mode)
        return total

    def max_abs_sq(self):
        best = None
        for row in self.data:
            for x in row:
                a = scalars.abs_sq(x, self.mode)
                if best is None or a > best:
                    best = a
        return best

    def __repr__(self):
        return f"Matrix({self.rows}x{self.cols}, {self.mode})"


def save_matrix(m: Matrix, path) -> None:
    """Write ``rows cols mode`` header then one whitespace-separated row per line."""
    with open(path, "w") as fh:
        fh.write(f"{m.rows} {m.cols} {m.mode}\n")
        for row in m.data:
            fh.write(" ".join(scalars.format_entry(x, m.mode) for x in row) + "\n")


def load_matrix(path) -> Matrix:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("matrix file header must be 'rows cols mode'")
        rows, cols, mode = int(header[0]), int(header[1]), header[2]
        if mode not in MODES:
            raise ValueError(f"unknown scalar mode {mode!r}")
        data = []
        for _ in range(rows):
            toks = fh.readline().split()
            if len(toks) != cols:
                raise ValueError("row length does not match header")
            data.append([scalars.parse_entry(t, mode) for t in toks])
    return Matrix(data, mode)


def det_cofactor(m: Matrix):
    """Determinant by cofactor expansion over column subsets (memoised).

    Exponential in n; intended as an independent oracle for small matrices.
    """
    if not m.is_square():
        raise ValueError("determinant needs a square matrix")
    n = m.rows
    if n == 0:
        return scalars.one(m.mode)
    data = m.data
    cache: dict[tuple[int, int], object] = {}

    def minor(row: int, colmask: int):
        if row == n:
            return scalars.one(m.mode)
        key = (row, colmask)
        got = cache.get(key)
        if got is not None:
            return got
        total = scalars.zero(m.mode)
        sign = 1
        for j in range(n):
            bit = 1 << j
            if not (colmask & bit):
                continue
            x = data[row][j]
            if x:
                sub = minor(row + 1, colmask & ~bit)
                term = x * sub
                total = total + term if sign > 0 else total - term
            sign = -sign
        cache[key] = total
        return total

    return minor(0, (1 << n) - 1)


def det_bareiss(m: Matrix):
    """Determinant by fraction-free (Bareiss) elimination with row pivoting."""
    if not m.is_square():
        raise ValueError("determinant needs a square matrix")
    n = m.rows
    if n == 0:
        return scalars.one(m.mode)
    a = [row[:] for row in m.data]
    one = scalars.one(m.mode)
    zero = scalars.zero(m.mode)
    sign = 1
    prev = one
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return zero
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = zero
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def random_rational(rng: random.Random, den: int = 64) -> Fraction:
    """Uniform on the grid {-den..den}/den inside [-1, 1]."""
    return Fraction(rng.randint(-den, den), den)


def random_matrix(n: int, mode: str, rng: random.Random, den: int = 64) -> Matrix:
    if mode == RATIONAL_REAL:
        gen = lambda: random_rational(rng, den)
    elif mode == RATIONAL_COMPLEX:
        gen = lambda: QComplex(random_rational(rng, den), random_rational(rng, den))
    elif mode == BINARY64_REAL:
        gen = lambda: rng.uniform(-1.0, 1.0)
    elif mode == BINARY64_COMPLEX:
        gen = lambda: complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
    else:
        raise ValueError(f"unknown scalar mode {mode!r}")
    return Matrix([[gen() for _ in range(n)] for _ in range(n)], mode)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows or a.mode != b.mode:
        raise ValueError("incompatible matrices")
    out = Matrix.zeros(a.rows, b.cols, a.mode)
    for i in range(a.rows):
        ai = a.data[i]
        oi = out.data[i]
        for k in range(a.cols):
            x = ai[k]
            if not x:
                continue
            bk = b.data[k]
            for j in range(b.cols):
                if bk[j]:
                    oi[j] = oi[j] + x * bk[j]
    return out


def madd(a: Matrix, b: Matrix) -> Matrix:
    if (a.rows, a.cols) != (b.rows, b.cols) or a.mode != b.mode:
        raise ValueError("incompatible matrices")
    return Matrix(
        [[a.data[i][j] + b.data[i][j] for j in range(a.cols)] for i in range(a.rows)],
        a.mode,
    )


def mscale(a: Matrix, s) -> Matrix:
    return Matrix([[x * s for x in row] for row in a.data], a.mode)
