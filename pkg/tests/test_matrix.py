import random
from fractions import Fraction

import pytest

from growthbound.matrix import (
    Matrix,
    det_bareiss,
    det_cofactor,
    load_matrix,
    madd,
    matmul,
    mscale,
    random_matrix,
    save_matrix,
)
from growthbound.scalars import BINARY64_REAL, RATIONAL_COMPLEX, RATIONAL_REAL


def test_constructors_and_indexing():
    m = Matrix([[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]], RATIONAL_REAL)
    assert m.rows == m.cols == 2
    assert m[1, 0] == Fraction(3)
    z = Matrix.zeros(2, 3)
    assert z.rows == 2 and z.cols == 3 and z[1, 2] == Fraction(0)
    e = Matrix.identity(3)
    assert e[0, 0] == Fraction(1) and e[0, 1] == Fraction(0)


def test_ragged_rows_rejected():
    with pytest.raises(ValueError):
        Matrix([[Fraction(1)], [Fraction(1), Fraction(2)]], RATIONAL_REAL)


def test_copy_is_deep():
    m = Matrix.identity(2)
    c = m.copy()
    c.data[0][0] = Fraction(5)
    assert m[0, 0] == Fraction(1)


def test_to_float_and_numpy():
    m = Matrix([[Fraction(1, 2), Fraction(-1, 4)]], RATIONAL_REAL)
    f = m.to_float()
    assert f.mode == BINARY64_REAL
    assert f[0, 0] == 0.5
    a = m.to_numpy()
    assert a.shape == (1, 2) and a[0, 1] == -0.25


def test_frobenius_and_max_abs_are_exact():
    m = Matrix([[Fraction(1, 3), Fraction(-2, 3)], [Fraction(0), Fraction(2)]], RATIONAL_REAL)
    assert m.frobenius_sq() == Fraction(1, 9) + Fraction(4, 9) + Fraction(4)
    assert m.max_abs_sq() == Fraction(4)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_det_oracles_agree_rational(n):
    # two independent exact determinants must agree on random input
    rng = random.Random(100 + n)
    for _ in range(20):
        m = random_matrix(n, RATIONAL_REAL, rng)
        assert det_cofactor(m) == det_bareiss(m)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_det_oracles_agree_complex(n):
    rng = random.Random(200 + n)
    for _ in range(10):
        m = random_matrix(n, RATIONAL_COMPLEX, rng)
        assert det_cofactor(m) == det_bareiss(m)


def test_det_known_values():
    m = Matrix([[Fraction(1), Fraction(2)], [Fraction(3), Fraction(4)]], RATIONAL_REAL)
    assert det_bareiss(m) == Fraction(-2)
    assert det_cofactor(Matrix.identity(4)) == Fraction(1)
    singular = Matrix([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], RATIONAL_REAL)
    assert det_bareiss(singular) == Fraction(0)


def test_det_multiplicativity():
    rng = random.Random(7)
    a = random_matrix(4, RATIONAL_REAL, rng)
    b = random_matrix(4, RATIONAL_REAL, rng)
    assert det_bareiss(matmul(a, b)) == det_bareiss(a) * det_bareiss(b)


def test_matrix_algebra_helpers():
    a = Matrix([[Fraction(1), Fraction(0)], [Fraction(2), Fraction(1)]], RATIONAL_REAL)
    b = Matrix.identity(2)
    assert matmul(a, b) == a
    s = madd(a, mscale(a, Fraction(-1)))
    assert s == Matrix.zeros(2, 2)


@pytest.mark.parametrize("mode", [RATIONAL_REAL, RATIONAL_COMPLEX, BINARY64_REAL])
def test_file_round_trip(tmp_path, mode):
    rng = random.Random(3)
    m = random_matrix(3, mode, rng)
    path = tmp_path / "m.txt"
    save_matrix(m, path)
    back = load_matrix(path)
    assert back.mode == mode
    assert back == m


def test_random_matrix_is_seeded():
    a = random_matrix(4, RATIONAL_REAL, random.Random(9))
    b = random_matrix(4, RATIONAL_REAL, random.Random(9))
    assert a == b
