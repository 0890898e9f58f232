"""Exact metric and volume, Laplace assembly, float geodesics and distance."""

import math
from fractions import Fraction as F

import numpy as np
import pytest

from minkeuclid.geometry import (
    GeodesicParams,
    distance,
    extended_table,
    geodesic_eval,
    geodesic_tangent0,
    laplace_beltrami,
    laplace_comparison,
    metric_and_volume_invariance,
    metric_matrix,
    path_length,
    volume_density,
)
from minkeuclid.grouplie import GroupElement, action_of, sample_group_element
from minkeuclid.matrices import Mat
from minkeuclid.polynomials import (
    Polynomial,
    RationalFunction,
    coordinate_table,
)
from minkeuclid.weyl import DiffOperator, op_equal

# ---------------------------------------------------------------- exact metric


def test_metric_entries_rank_two():
    g20 = metric_matrix(2, 0)
    table = g20.table
    A = RationalFunction.variable(table, "A")
    y1 = Polynomial.variable(table, "y_1_1")
    y3 = Polynomial.variable(table, "y_1_2")
    y2 = Polynomial.variable(table, "y_2_2")
    det = y1 * y2 - y3 * y3
    det2 = RationalFunction.from_poly(det * det)
    assert g20.names == ("y_1_1", "y_1_2", "y_2_2")
    assert g20.entry(0, 0) == A * (y2 * y2) / det2
    assert g20.entry(2, 2) == A * (y1 * y1) / det2
    assert g20.entry(1, 1) == A * (y1 * y2 + y3 * y3) * 2 / det2
    assert g20.entry(0, 2) == A * (y3 * y3) / det2
    assert g20.entry(0, 1) == A * (y2 * y3) * (-2) / det2
    assert g20.entry(1, 2) == A * (y1 * y3) * (-2) / det2


def test_metric_at_identity_matrix():
    g20 = metric_matrix(2, 0)
    table = g20.table
    A = RationalFunction.variable(table, "A")
    at_i = {"y_1_1": 1, "y_1_2": 0, "y_2_2": 1}
    for i in range(3):
        for j in range(3):
            got = g20.entry(i, j).subst(at_i)
            if i != j:
                assert got.is_zero()
            else:
                assert got == (A * 2 if i == 1 else A)


def test_metric_block_structure():
    g21 = metric_matrix(2, 1)
    at_i = {"y_1_1": 1, "y_1_2": 0, "y_2_2": 1}
    B = RationalFunction.variable(g21.table, "B")
    for i in (3, 4):
        assert g21.entry(i, i).subst(at_i) == B
    assert g21.entry(3, 4).subst(at_i).is_zero()
    assert g21.entry(0, 3).is_zero() and g21.entry(2, 4).is_zero()


def test_metric_fixed_scales():
    g = metric_matrix(1, 0, a_value=F(4))
    y = Polynomial.variable(g.table, "y_1_1")
    assert g.entry(0, 0) == RationalFunction.constant(g.table, 4) / \
        RationalFunction.from_poly(y * y)


def test_volume_density_rank_one():
    vd = volume_density(1, 1)
    ext = extended_table(1, 1)
    assert vd.num.is_one()
    assert vd.den == Polynomial.variable(ext, "u") ** 3


@pytest.mark.parametrize("nm", [(1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)])
def test_metric_and_volume_invariance(nm):
    n, m = nm
    table = coordinate_table(n, m)
    for s in range(2):
        gl = sample_group_element(n, m, seed=f"geo:{n}:{m}:{s}")
        act = action_of(gl, table)
        assert metric_and_volume_invariance(n, m, act, points=3,
                                            seed=f"pt:{n}:{m}:{s}")


# ---------------------------------------------------------------- Laplace


def test_laplace_beltrami_rank_one():
    lb = laplace_beltrami(metric_matrix(1, 0))
    t = coordinate_table(1, 0)
    a = RationalFunction.variable(t, "A")
    y = Polynomial.variable(t, "y_1_1")
    want = (DiffOperator.partial(t, {"y_1_1": 2},
                                 RationalFunction.from_poly(y * y) / a)
            + DiffOperator.partial(t, {"y_1_1": 1},
                                   RationalFunction.from_poly(y) / a))
    assert op_equal(lb, want)


def test_laplace_beltrami_rank_two_display():
    lb = laplace_beltrami(metric_matrix(2, 0))
    t = coordinate_table(2, 0)
    a = RationalFunction.variable(t, "A")
    y1 = Polynomial.variable(t, "y_1_1")
    y2 = Polynomial.variable(t, "y_2_2")
    y3 = Polynomial.variable(t, "y_1_2")

    def part(orders, coeff):
        return DiffOperator.partial(t, orders,
                                    RationalFunction.from_poly(coeff) / a)

    want = (part({"y_1_1": 2}, y1 * y1)
            + part({"y_2_2": 2}, y2 * y2)
            + part({"y_1_2": 2}, (y1 * y2 + y3 * y3) * F(1, 2))
            + part({"y_1_1": 1, "y_2_2": 1}, y3 * y3 * 2)
            + part({"y_1_1": 1, "y_1_2": 1}, y1 * y3 * 2)
            + part({"y_2_2": 1, "y_1_2": 1}, y2 * y3 * 2)
            + part({"y_1_1": 1}, y1 * F(3, 2))
            + part({"y_2_2": 1}, y2 * F(3, 2))
            + part({"y_1_2": 1}, y3 * F(3, 2)))
    assert op_equal(lb, want)


@pytest.mark.parametrize("nm", [(1, 0), (2, 0), (1, 1), (2, 1)])
def test_laplace_comparison(nm):
    comp = laplace_comparison(*nm)
    assert comp.equal, str(comp.difference)


def test_laplace_size_guard():
    with pytest.raises(ValueError, match="guard"):
        laplace_beltrami(metric_matrix(3, 0))


# ---------------------------------------------------------------- geodesics


def test_geodesic_scalar_exponential():
    p = GeodesicParams(k=np.eye(1), lam=(1.0,), z=np.zeros((0, 1)))
    assert abs(geodesic_eval(p, 0.0).y[0, 0] - 1.0) < 1e-15
    assert abs(geodesic_eval(p, 0.7).y[0, 0] - math.exp(1.4)) < 1e-12


def test_geodesic_starts_at_base_point():
    rng = np.random.default_rng(7)
    qmat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    params = GeodesicParams(k=qmat, lam=(0.3, -0.4, 0.9),
                            z=rng.normal(size=(2, 3)) * 0.5)
    p0 = geodesic_eval(params, 0.0)
    assert np.max(np.abs(p0.y - np.eye(3))) < 1e-12
    assert np.max(np.abs(p0.v)) < 1e-12


def test_geodesic_tangent_matches_finite_difference():
    rng = np.random.default_rng(7)
    qmat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    params = GeodesicParams(k=qmat, lam=(0.3, -0.4, 0.9),
                            z=rng.normal(size=(2, 3)) * 0.5)
    ty, tv = geodesic_tangent0(params)
    h = 1e-6
    plus = geodesic_eval(params, h)
    minus = geodesic_eval(params, -h)
    assert np.max(np.abs((plus.y - minus.y) / (2 * h) - ty)) < 1e-8
    assert np.max(np.abs((plus.v - minus.v) / (2 * h) - tv)) < 1e-8


def test_geodesic_zero_eigenvalue_branch():
    p = GeodesicParams(k=np.eye(2), lam=(0.0, 0.5), z=np.array([[1.0, 2.0]]))
    pt = geodesic_eval(p, 1.0)
    assert abs(pt.v[0, 0] - 1.0) < 1e-14


def test_geodesic_frame_validation():
    with pytest.raises(ValueError):
        GeodesicParams(k=np.array([[1.0, 1.0], [0.0, 1.0]]), lam=(1.0, 1.0),
                       z=None)


# ---------------------------------------------------------------- distance


def test_distance_scalar_log():
    res = distance((np.array([[1.0]]), None), (np.array([[math.exp(2.0)]]), None))
    assert abs(res.value - 2.0) < 1e-9
    assert abs(res.t[0] - math.exp(2.0)) < 1e-9


def test_distance_equal_y_block():
    y0 = np.array([[2.0, 0.3], [0.3, 1.5]])
    v0 = np.array([[0.1, -0.2]])
    v1 = np.array([[1.3, 0.7]])
    res = distance((y0, v0), (y0, v1), a=1.0, b=3.0)
    want = 3.0 * np.linalg.norm((v1 - v0) @ res.g.T)
    assert abs(res.value - want) < 1e-9
    same = distance((y0, v0), (y0, v0))
    assert abs(same.value) < 1e-12


def test_distance_symmetry():
    y0 = np.array([[2.0, 0.3], [0.3, 1.5]])
    y1 = np.array([[3.0, -0.4], [-0.4, 0.8]])
    d01 = distance((y0, None), (y1, None)).value
    d10 = distance((y1, None), (y0, None)).value
    assert abs(d01 - d10) < 1e-9


def test_distance_conventions():
    p0 = (np.array([[1.0]]), None)
    p1 = (np.array([[math.exp(2.0)]]), None)
    assert abs(distance(p0, p1, a=4.0).value - 8.0) < 1e-9
    assert abs(distance(p0, p1, a=4.0, convention="sqrt-scaled").value
               - 4.0) < 1e-9
    with pytest.raises(ValueError):
        distance(p0, p1, convention="bogus")


def test_path_length_matches_distance():
    rng = np.random.default_rng(7)
    qmat, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    params = GeodesicParams(k=qmat, lam=(0.3, -0.4, 0.9), z=np.zeros((0, 3)))
    end = geodesic_eval(params, 1.0)
    plen = path_length(params, 0.0, 1.0)
    dist = distance((np.eye(3), None), (end.y, None)).value
    assert abs(plen - dist) < 1e-6
    assert abs(dist - 2 * math.sqrt(0.09 + 0.16 + 0.81)) < 1e-9


def test_distance_rejects_non_positive_definite():
    bad = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        distance((bad, None), (np.eye(2), None))
