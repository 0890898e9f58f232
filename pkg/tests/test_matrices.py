"""Dense exact matrices over Fraction and polynomial entries."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from minkeuclid.matrices import (
    InconsistentSystemError,
    Mat,
    ShapeError,
    SingularMatrixError,
    UnderdeterminedSystemError,
    solve_exact,
)
from minkeuclid.polynomials import Polynomial, RationalFunction, coordinate_table


def fmat(rows):
    return Mat(len(rows), len(rows[0]), [[F(x) for x in r] for r in rows])


def test_constructors_and_indexing():
    a = fmat([[1, 2], [3, 4]])
    assert a[0, 1] == 2 and a.row(1) == (F(3), F(4))
    assert Mat.eye(2) == fmat([[1, 0], [0, 1]])
    assert Mat.zeros(2, 3).rows == 2 and Mat.zeros(2, 3).cols == 3
    assert Mat.diag([F(2), F(5)]) == fmat([[2, 0], [0, 5]])


def test_shape_errors():
    a = fmat([[1, 2], [3, 4]])
    b = fmat([[1, 2, 3]])
    with pytest.raises(ShapeError):
        a + b
    with pytest.raises(ShapeError):
        b @ b
    with pytest.raises(ShapeError):
        Mat(2, 2, [[F(1), F(2)]])


def test_inverse_golden():
    a = fmat([[2, 1], [1, 1]])
    assert a.inv() == fmat([[1, -1], [-1, 2]])
    assert a @ a.inv() == Mat.eye(2)
    with pytest.raises(SingularMatrixError):
        fmat([[1, 2], [2, 4]]).inv()


def test_det_golden():
    assert fmat([[2, 1], [1, 1]]).det() == 1
    a = fmat([[1, 2, 3], [4, 5, 6], [7, 8, 10]])
    assert a.det() == -3
    assert a.T.det() == -3


SMALL = st.integers(-6, 6)


def int_mats(n):
    return st.lists(st.lists(SMALL, min_size=n, max_size=n),
                    min_size=n, max_size=n).map(fmat)


@given(int_mats(3), int_mats(3))
@settings(max_examples=40, deadline=None)
def test_det_is_multiplicative(a, b):
    assert (a @ b).det() == a.det() * b.det()


@given(int_mats(3))
@settings(max_examples=40, deadline=None)
def test_adjugate_identity(a):
    adj = a.adjugate()
    d = a.det()
    assert a @ adj == Mat.eye(3).scale(d)
    assert adj @ a == Mat.eye(3).scale(d)


@given(int_mats(3))
@settings(max_examples=30, deadline=None)
def test_inverse_roundtrip(a):
    if a.det() == 0:
        with pytest.raises(SingularMatrixError):
            a.inv()
        return
    assert a @ a.inv() == Mat.eye(3)
    assert a.inv().inv() == a


def test_solve_exact_golden():
    # one right-hand side: the result is a single solution column
    x = solve_exact([[F(2), F(1)], [F(1), F(3)]], [[F(5)], [F(10)]])
    assert x == [[F(1), F(3)]]


def test_solve_exact_overdetermined_consistent():
    # three equations, two unknowns, consistent
    a = [[F(1), F(0)], [F(0), F(1)], [F(1), F(1)]]
    rhs = [[F(2)], [F(3)], [F(5)]]
    assert solve_exact(a, rhs) == [[F(2), F(3)]]
    rhs_bad = [[F(2)], [F(3)], [F(6)]]
    with pytest.raises(InconsistentSystemError):
        solve_exact(a, rhs_bad)


def test_solve_exact_underdetermined():
    with pytest.raises(UnderdeterminedSystemError):
        solve_exact([[F(1), F(1)]], [[F(2)]])


def test_symmetry_predicates():
    assert fmat([[1, 2], [2, 3]]).is_symmetric()
    assert not fmat([[1, 2], [3, 1]]).is_symmetric()
    assert fmat([[0, 2], [-2, 0]]).is_skew()
    assert not fmat([[1, 2], [-2, 0]]).is_skew()


def test_positive_definiteness():
    assert fmat([[2, 1], [1, 2]]).is_positive_definite()
    assert not fmat([[1, 2], [2, 1]]).is_positive_definite()
    assert fmat([[2, 1], [1, 2]]).leading_principal_minors() == [F(2), F(3)]


def test_polynomial_entries():
    """The same Mat type runs over polynomial entries with explicit zeros."""
    t = coordinate_table(2, 0)
    y1 = Polynomial.variable(t, "y_1_1")
    y3 = Polynomial.variable(t, "y_1_2")
    y2 = Polynomial.variable(t, "y_2_2")
    zero = Polynomial.zero(t)
    ymat = Mat(2, 2, [[y1, y3], [y3, y2]])
    assert ymat.det(zero) == y1 * y2 - y3 ** 2
    assert ymat.trace(zero) == y1 + y2
    prod = ymat.mul(ymat, zero)
    assert prod[0, 0] == y1 ** 2 + y3 ** 2


def test_rational_function_inverse():
    t = coordinate_table(2, 0)
    y1 = RationalFunction.variable(t, "y_1_1")
    y3 = RationalFunction.variable(t, "y_1_2")
    y2 = RationalFunction.variable(t, "y_2_2")
    ymat = Mat(2, 2, [[y1, y3], [y3, y2]])
    inv = ymat.inv()
    zero = RationalFunction.constant(t, 0)
    one = RationalFunction.constant(t, 1)
    prod = ymat.mul(inv, zero)
    assert prod == Mat(2, 2, [[one, zero], [zero, one]])
