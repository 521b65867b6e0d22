import math
import random
from fractions import Fraction

import pytest

from exact_linalg import (
    affine_dimension, bareiss_det, cofactor_normal, column_echelon_transform, extended_gcd,
    is_primitive, primitive, rank, rational_det, solve_rational, vec_mat,
)


def test_bareiss_det_small_matrices():
    assert bareiss_det([[2, 1], [1, 1]]) == 1
    assert bareiss_det([[0, 1], [1, 0]]) == -1
    assert bareiss_det([[2, 2, 1], [1, 1, 1], [1, 0, 0]]) == 1
    assert bareiss_det([[1, 2], [2, 4]]) == 0
    assert bareiss_det([]) == 1


def test_bareiss_matches_cofactor_expansion_on_random_matrices():
    rng = random.Random(5)
    for _ in range(30):
        m = [[rng.randint(-6, 6) for _ in range(3)] for _ in range(3)]
        expected = (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )
        assert bareiss_det(m) == expected


def test_rank_over_rationals():
    assert rank([[1, 2], [2, 4]]) == 1
    assert rank([[Fraction(1, 2), 1], [1, 2], [0, 1]]) == 2
    assert rank([]) == 0


def test_primitive_vectors():
    assert primitive((2, 4, 6)) == (1, 2, 3)
    assert is_primitive((2, 2, 1))
    assert not is_primitive((2, 4))
    with pytest.raises(ValueError):
        primitive((0, 0))


def test_affine_dimension():
    assert affine_dimension([]) == -1
    assert affine_dimension([(1, 2)]) == 0
    assert affine_dimension([(2, 0), (0, 3)]) == 1
    assert affine_dimension([(3, 0, 0), (0, 3, 0), (0, 0, 3), (1, 1, 1)]) == 2


def test_cofactor_normal_of_an_edge():
    # points (2,0) and (0,3)
    assert cofactor_normal([(-2, 3)], 2) == (3, 2)
    assert cofactor_normal([(1, 1)], 1) == (1,)


def test_column_echelon_transform_is_unimodular():
    rows = [[2, 2, -2], [3, 0, -3]]
    transform, r = column_echelon_transform(rows, 3)
    assert r == 2
    assert abs(bareiss_det(transform)) == 1
    for row in rows:
        assert vec_mat(row, transform)[r:] == (0,)


def test_solve_rational():
    assert solve_rational([[1, 1], [1, -1]], [3, 1]) == [2, 1]
    assert solve_rational([[1, 2], [2, 4]], [1, 2]) is None


def test_rational_det():
    assert rational_det([[Fraction(1, 2), 0], [0, 2]]) == 1
    assert rational_det([[1, Fraction(1, 3)], [0, Fraction(3, 4)]]) == Fraction(3, 4)


def test_extended_gcd():
    assert extended_gcd(3, 2) == (1, -1, 1)
    assert extended_gcd(0, 5) == (0, 1, 5)
    assert extended_gcd(0, 0)[2] == 0
    rng = random.Random(11)
    for _ in range(100):
        a, b = rng.randint(-50, 50), rng.randint(-50, 50)
        x, y, g = extended_gcd(a, b)
        assert g == math.gcd(a, b)
        assert a * x + b * y == g
