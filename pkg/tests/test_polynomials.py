"""Exact polynomial and rational-function layer."""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from minkeuclid.polynomials import (
    EvaluationError,
    ExactDivisionError,
    PointEvaluator,
    Polynomial,
    RationalFunction,
    SubstitutionCache,
    TableMismatchError,
    Variable,
    VariableTable,
    algebra_table,
    coordinate_table,
    graded_exponents,
    mono_key,
    num_coords,
    poly_divexact,
    poly_gcd,
    sym_pairs,
)

T20 = coordinate_table(2, 0)
T21 = coordinate_table(2, 1)


def Y(table, i, j):
    return Polynomial.variable(table, f"y_{i}_{j}")


# ---------------------------------------------------------------- tables


def test_table_layout():
    t = coordinate_table(2, 1)
    assert [v.name for v in t.variables[:5]] == [
        "y_1_1", "y_1_2", "y_2_2", "v_1_1", "v_1_2"]
    assert "A" in t and "B" in t and "pi" in t
    assert t.index("y_1_2") == 1
    assert num_coords(2, 1) == 5
    assert list(sym_pairs(2)) == [(1, 1), (1, 2), (2, 2)]


def test_algebra_table_layout():
    t = algebra_table(2, 1)
    assert [v.name for v in t.variables] == [
        "x_1_1", "x_1_2", "x_2_2", "z_1_1", "z_1_2"]


def test_variable_roles():
    with pytest.raises(ValueError):
        Variable("y_1_1", "bogus")
    t = coordinate_table(1, 1)
    ys = t.role_indices("coord-y")
    vs = t.role_indices("coord-v")
    assert ys == (0,) and vs == (1,)


def test_table_mismatch_is_an_error():
    a = Y(T20, 1, 1)
    b = Y(T21, 1, 1)
    with pytest.raises(TableMismatchError):
        a + b


# ---------------------------------------------------------------- ordering


def test_graded_lex_leading_term():
    y1, y3 = Y(T20, 1, 1), Y(T20, 1, 2)
    p = y1 ** 2 + y1 * y3 * 5 - y3 + Polynomial.constant(T20, 7)
    exps, c = p.sorted_terms()[0]
    # same degree: lex on exponents breaks the tie, y1^2 > y1*y3
    assert p.table.names[0] == "y_1_1" and exps[0] == 2 and c == 1
    degrees = [sum(e) for e, _ in p.sorted_terms()]
    assert degrees == sorted(degrees, reverse=True)


def test_graded_exponents_enumeration():
    exps = graded_exponents(2, 2)
    assert exps == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert sorted(exps, key=mono_key) == exps


# ---------------------------------------------------------------- arithmetic


def test_det_square_coefficient():
    y1, y3, y2 = Y(T20, 1, 1), Y(T20, 1, 2), Y(T20, 2, 2)
    det = y1 * y2 - y3 ** 2
    sq = det ** 2
    pad = (0,) * (len(T20) - 3)
    # columns are ordered y_1_1, y_1_2, y_2_2, then the parameter slots
    assert sq.coefficient((1, 2, 1) + pad) == -2
    assert sq.coefficient((2, 0, 2) + pad) == 1
    assert sq.coefficient((0, 4, 0) + pad) == 1
    assert sq.total_degree() == 4


def test_str_rendering():
    y1, y3 = Y(T21, 1, 1), Y(T21, 1, 2)
    v = Polynomial.variable(T21, "v_1_1")
    p = y1 ** 2 * v * F(3, 2) - y3 + Polynomial.constant(T21, 5)
    assert str(p) == "3/2*y_1_1^2*v_1_1 - y_1_2 + 5"
    assert str(Polynomial.zero(T21)) == "0"


def test_scalar_coercion():
    y = Y(T20, 1, 1)
    assert y * 2 == 2 * y
    assert y * F(1, 2) + y * F(1, 2) == y
    assert (y + 1) - 1 == y
    assert 1 - (Polynomial.one(T20) - y) == y


def small_polys(table, names, coeff_range=4, degree=2):
    """Strategy: sparse polynomials in the named columns of ``table``."""
    idx = [table.index(nm) for nm in names]
    width = len(table)

    def build(pairs):
        terms = {}
        for exps, num, den in pairs:
            full = [0] * width
            for k, e in zip(idx, exps):
                full[k] = e
            key = tuple(full)
            terms[key] = terms.get(key, F(0)) + F(num, den)
        return Polynomial(table, terms)

    exp_tuples = st.tuples(*[st.integers(0, degree) for _ in idx])
    coeffs = st.tuples(exp_tuples,
                       st.integers(-coeff_range, coeff_range),
                       st.integers(1, 3))
    return st.lists(coeffs, min_size=0, max_size=4).map(build)


POLYS = small_polys(T20, ("y_1_1", "y_1_2", "y_2_2"))


@given(POLYS, POLYS, POLYS)
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == Polynomial.zero(T20)
    assert a * Polynomial.one(T20) == a


@given(POLYS, POLYS)
@settings(max_examples=40, deadline=None)
def test_product_rule(a, b):
    for var in ("y_1_1", "y_1_2"):
        lhs = (a * b).diff(var)
        rhs = a.diff(var) * b + a * b.diff(var)
        assert lhs == rhs


@given(POLYS)
@settings(max_examples=40, deadline=None)
def test_pow_matches_repeated_product(a):
    assert a ** 3 == a * a * a
    assert a ** 0 == Polynomial.one(T20)


# ------------------------------------------------------------ exact division


def test_divexact_linear():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    q = poly_divexact(y ** 2 - 1, y - 1)
    assert q == y + 1


def test_divexact_rejects_nondivisor():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    with pytest.raises(ExactDivisionError):
        poly_divexact(y ** 2 + 1, y - 1)


def test_gcd_pulls_out_det():
    y1, y3, y2 = Y(T20, 1, 1), Y(T20, 1, 2), Y(T20, 2, 2)
    det = y1 * y2 - y3 ** 2
    a = det * (y1 + 1)
    b = det * (y2 + 3) * F(5, 7)
    g = poly_gcd(a, b)
    assert g.total_degree() == 2
    assert poly_divexact(a, g) * g == a
    assert poly_divexact(b, g) * g == b


@given(POLYS, POLYS, POLYS)
@settings(max_examples=25, deadline=None)
def test_gcd_divides_both(a, b, c):
    x, y = a * c, b * c
    if x.is_zero() and y.is_zero():
        return
    g = poly_gcd(x, y)
    assert not g.is_zero()
    assert poly_divexact(x, g) * g == x
    assert poly_divexact(y, g) * g == y


# ------------------------------------------------------------ rational functions


def test_rf_canonical_on_construction():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    r = RationalFunction(y ** 2 - 1, y - 1)
    assert r.is_polynomial()
    assert r.as_polynomial() == y + 1
    r2 = RationalFunction(y * 2, y ** 2)
    assert r2.num == Polynomial.constant(t, 2) and r2.den == y


def test_rf_denominator_normalization():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    a = RationalFunction(y, -(y + 1))
    b = RationalFunction(-y, y + 1)
    assert a == b
    assert str(a) == str(b)


def test_rf_point_evaluation():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    r = RationalFunction(y ** 2 + 1, y)
    assert r.eval_rational({"y_1_1": F(1, 2)}) == F(5, 2)
    with pytest.raises(EvaluationError):
        r.eval_rational({"y_1_1": F(0)})


def test_rf_zero_denominator_rejected():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    with pytest.raises(ZeroDivisionError):
        RationalFunction(y, Polynomial.zero(t))


@given(POLYS, POLYS, POLYS)
@settings(max_examples=40, deadline=None)
def test_rf_cancellation_invariance(a, b, c):
    if b.is_zero() or c.is_zero():
        return
    assert RationalFunction(a * c, b * c) == RationalFunction(a, b)


@given(POLYS, POLYS)
@settings(max_examples=40, deadline=None)
def test_rf_field_ops(a, b):
    if a.is_zero() or b.is_zero():
        return
    f = RationalFunction(a, b)
    g = RationalFunction(b, a)
    one = RationalFunction.constant(T20, 1)
    assert f * g == one
    assert f / f == one
    assert (f + g) - g == f


def test_rf_diff_quotient_rule():
    t = coordinate_table(1, 0)
    y = Polynomial.variable(t, "y_1_1")
    r = RationalFunction(Polynomial.one(t), y)
    assert r.diff("y_1_1") == RationalFunction(Polynomial.constant(t, -1), y ** 2)


# ------------------------------------------------------------ substitution


def test_subst_polynomial_binding():
    y1, y3 = Y(T20, 1, 1), Y(T20, 1, 2)
    p = y1 ** 2 + y3
    q = p.subst({"y_1_1": y3 + 1})
    assert q == (y3 + 1) ** 2 + y3


def test_substitution_cache_matches_direct():
    y1, y3, y2 = Y(T20, 1, 1), Y(T20, 1, 2), Y(T20, 2, 2)
    images = {"y_1_1": y2 + 1, "y_1_2": y1 * 2, "y_2_2": y3 - 5}
    cache = SubstitutionCache(T20, images)
    p = y1 * y3 * 3 - y2 ** 2 + y1
    assert cache.subst(p) == p.subst(images)


def test_point_evaluator_matches_eval():
    vals = {"y_1_1": F(2), "y_1_2": F(-1, 3), "y_2_2": F(7, 2)}
    ev = PointEvaluator(T20, vals)
    y1, y3, y2 = Y(T20, 1, 1), Y(T20, 1, 2), Y(T20, 2, 2)
    p = y1 ** 3 * y3 - y2 * F(4, 9) + 11
    assert ev.poly(p) == p.eval_rational(vals)


def test_truncate_drops_high_degree():
    y1, y3 = Y(T20, 1, 1), Y(T20, 1, 2)
    p = y1 ** 3 + y1 * y3 + 1
    idx = (0, 1, 2)
    assert p.truncate(idx, 2) == y1 * y3 + 1
    assert p.truncate(idx, 0) == Polynomial.one(T20)
