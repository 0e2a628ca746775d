from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from critmaps.exactpoly import Poly, UsageError
from critmaps.linalg import det, det_poly, echelon, identity, inverse, matmul, matvec, nullspace, rank, solve

small = st.integers(-5, 5)


def test_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
    assert rank(rows) == 2
    (v,) = nullspace(rows, 3)
    assert matvec(rows, v) == [0, 0, 0]


def test_echelon_is_row_primitive():
    rows, piv = echelon([[2, 4], [6, 8]])
    assert piv == [0, 1]
    assert rows == [[1, 0], [0, 1]]


def test_solve_and_inverse():
    A = [[2, 1], [1, 3]]
    x = solve(A, [3, 5])
    assert matvec(A, x) == [3, 5]
    assert matmul(A, inverse(A)) == identity(2)


def test_singular_inverse():
    with pytest.raises(UsageError):
        inverse([[1, 2], [2, 4]])


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_det_multiplicative(A):
    B = [[1, 2, 0], [0, 1, 3], [1, 0, 1]]
    assert det(matmul(A, B)) == det(A) * det(B)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=2, max_size=5))
def test_nullspace_vectors_are_killed(rows):
    ker = nullspace(rows, 4)
    assert len(ker) == 4 - rank(rows)
    for v in ker:
        assert all(x == 0 for x in matvec(rows, v))


def test_det_poly_matches_numeric():
    u1, u2 = Poly.variables(2)
    M = [[u1, u2, Poly.const(2, 1)], [u2, u1, u1], [Poly.const(2, 2), u2, u1 * u2]]
    D = det_poly(M)
    for pt in ([1, 2], [Fraction(1, 3), -4]):
        num = [[e(pt) for e in row] for row in M]
        assert D(pt) == det(num)
