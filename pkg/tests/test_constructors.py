"""Named operator families: worked expansions, identities, invariance."""

from fractions import Fraction as F

import pytest

from minkeuclid.constructors import (
    NoncommutingEntriesError,
    OPERATOR_FAMILIES,
    build_base_matrices,
    build_operator,
    parse_operator_spec,
)
from minkeuclid.geometry import det_y_polynomial
from minkeuclid.grouplie import action_of, sample_group_element
from minkeuclid.polynomials import Polynomial, coordinate_table
from minkeuclid.weyl import (
    DiffOperator,
    invariance_check,
    op_commutator,
    op_equal,
)

N, M = 2, 1
T = coordinate_table(N, M)

Y1 = Polynomial.variable(T, "y_1_1")
Y2 = Polynomial.variable(T, "y_2_2")
Y3 = Polynomial.variable(T, "y_1_2")


def _d(**kw):
    return DiffOperator.partial(T, kw)


@pytest.fixture(scope="module")
def ops():
    return {
        "D1": build_operator("D:j=1", N, M, T),
        "D2": build_operator("D:j=2", N, M, T),
        "Psi": build_operator("Psi:p=1,q=1", N, M, T),
        "Delta": build_operator("Delta:p=1,q=1", N, M, T),
    }


# ---------------------------------------------------------------- spec strings


@pytest.mark.parametrize("text", [
    "D:j=2", "Psi:p=1,q=1", "Phi:j=1;S=[[1]]", "M;M=[[2,1],[1,2]]",
    "Laplacian:A=1,B=1,convention=trace", "SelbergD:i=3",
    "PhiIPJ:i=1,p=1,j=2;S=[[1,1/2],[1/2,3]]", "LS:p=2;S=[[1,0],[0,1]]",
])
def test_spec_text_round_trip(text):
    spec = parse_operator_spec(text)
    assert parse_operator_spec(spec.text()) == spec


def test_known_families_listed():
    assert "D" in OPERATOR_FAMILIES and "Laplacian" in OPERATOR_FAMILIES


@pytest.mark.parametrize("bad", [
    "Bogus:j=1",
    "D:j=5",          # out of range at n=2
    "Psi:p=2,q=1",    # needs p <= q
    "Phi:j=1",        # S required when m > 0
])
def test_bad_specs_rejected(bad):
    with pytest.raises(ValueError):
        build_operator(bad, N, M)


def test_laplacian_convention_values():
    with pytest.raises(ValueError):
        build_operator("Laplacian:A=1,B=1,convention=bogus", N, M)


# ---------------------------------------------------------------- expansions


def test_d1_expansion(ops):
    want = 2 * (DiffOperator.mult(Y1) * _d(y_1_1=1)
                + DiffOperator.mult(Y2) * _d(y_2_2=1)
                + DiffOperator.mult(Y3) * _d(y_1_2=1))
    assert op_equal(ops["D1"], want)


def test_d2_expansion(ops):
    d1, d2, d3 = _d(y_1_1=1), _d(y_2_2=1), _d(y_1_2=1)
    want = (3 * ops["D1"]
            + 8 * (DiffOperator.mult(Y3 ** 2) * (d1 * d2)
                   + DiffOperator.mult(Y1 * Y3) * (d1 * d3)
                   + DiffOperator.mult(Y2 * Y3) * (d2 * d3))
            + 4 * (DiffOperator.mult(Y1 ** 2) * (d1 * d1)
                   + DiffOperator.mult(Y2 ** 2) * (d2 * d2)
                   + DiffOperator.mult((Y1 * Y2 + Y3 ** 2) * F(1, 2)) * (d3 * d3)))
    assert op_equal(ops["D2"], want)


def test_psi_expansion(ops):
    dv1, dv2 = _d(v_1_1=1), _d(v_1_2=1)
    want = (DiffOperator.mult(Y1) * (dv1 * dv1)
            + 2 * (DiffOperator.mult(Y3) * (dv1 * dv2))
            + DiffOperator.mult(Y2) * (dv2 * dv2))
    assert op_equal(ops["Psi"], want)


def test_delta_expansion(ops):
    d1, d2, d3 = _d(y_1_1=1), _d(y_2_2=1), _d(y_1_2=1)
    dv1, dv2 = _d(v_1_1=1), _d(v_1_2=1)
    want = (2 * (DiffOperator.mult(Y1 ** 2) * (d1 * dv1 * dv1)
                 + 2 * (DiffOperator.mult(Y1 * Y3) * (d1 * dv1 * dv2))
                 + DiffOperator.mult(Y3 ** 2) * (d1 * dv2 * dv2))
            + 2 * (DiffOperator.mult(Y3 ** 2) * (d2 * dv1 * dv1)
                   + 2 * (DiffOperator.mult(Y2 * Y3) * (d2 * dv1 * dv2))
                   + DiffOperator.mult(Y2 ** 2) * (d2 * dv2 * dv2))
            + 2 * (DiffOperator.mult(Y1 * Y3) * (d3 * dv1 * dv1)
                   + DiffOperator.mult(Y1 * Y2 + Y3 ** 2) * (d3 * dv1 * dv2)
                   + DiffOperator.mult(Y2 * Y3) * (d3 * dv2 * dv2))
            + 3 * ops["Psi"])
    assert op_equal(ops["Delta"], want)


# ---------------------------------------------------------------- identities


def test_bracket_d1_psi(ops):
    assert op_equal(op_commutator(ops["D1"], ops["Psi"]), 2 * ops["Psi"])


def test_bracket_d2_psi_corrected(ops):
    """[D2, Psi] against the determinant-corrected right-hand side.

    The worked display of this bracket carries a spurious trailing term
    -4(y1 y2 + y3^2) d3 dv1 dv2; the identity holds exactly without it, and
    the defect operator is pinned term-for-term below.
    """
    D1, D2, Psi = ops["D1"], ops["D2"], ops["Psi"]
    base = build_base_matrices(N, M, T)
    detY = det_y_polynomial(T, N)
    detcorr = DiffOperator.mult(detY) * (base.DY + base.DV.T @ base.DV).det()
    detplain = DiffOperator.mult(detY) * base.DY.det()
    rhs = (2 * (2 * D1 - DiffOperator.identity(T)) * Psi
           - 8 * detcorr + 8 * detplain)
    lhs = op_commutator(D2, Psi)
    assert op_equal(lhs, rhs)

    trailing = 4 * (DiffOperator.mult(Y1 * Y2 + Y3 ** 2)
                    * _d(y_1_2=1, v_1_1=1, v_1_2=1))
    displayed = rhs - trailing
    assert op_equal(lhs - displayed, trailing)
    assert not op_equal(lhs, displayed)


def test_phi_reduces_to_d_at_m_zero():
    for j in (1, 2):
        a = build_operator(f"Phi:j={j};S=[[1]]", 2, 0)
        b = build_operator(f"D:j={j}", 2, 0)
        assert op_equal(a, b)


def test_selberg_commute():
    t3 = coordinate_table(3, 0)
    sd = [build_operator(f"SelbergD:i={i}", 3, 0, t3) for i in (1, 2, 3)]
    for a in range(3):
        for b in range(a + 1, 3):
            assert op_commutator(sd[a], sd[b]).is_zero()


def test_selberg_d1_is_half_d1():
    s1 = build_operator("SelbergD:i=1", N, M, T)
    d1 = build_operator("D:j=1", N, M, T)
    assert op_equal(d1, 2 * s1)


# ---------------------------------------------------------------- invariance


@pytest.mark.parametrize("text", [
    "L:p=1", "S:j=1,p=1", "LS:p=1;S=[[2]]", "Phi:j=2;S=[[1]]",
    "PhiIPJ:i=1,p=1,j=1;S=[[1]]", "M;M=[[2]]", "Laplacian:A=1,B=1",
    "Laplacian",
])
def test_family_invariance(text):
    g = sample_group_element(N, M, "ctor-inv")
    act = action_of(g, T)
    op = build_operator(text, N, M, T)
    rep = invariance_check(op, act)
    assert rep.ok, f"{text}: {rep}"


def test_laplacian_conventions_coincide_at_m1():
    lap = build_operator("Laplacian:A=1,B=1", N, M, T)
    low = build_operator("Laplacian:A=1,B=1,convention=lower", N, M, T)
    trc = build_operator("Laplacian:A=1,B=1,convention=trace", N, M, T)
    assert op_equal(lap, low)
    assert op_equal(lap, trc)


def test_laplacian_conventions_differ_at_m2():
    t22 = coordinate_table(2, 2)
    low = build_operator("Laplacian:A=1,B=1,convention=lower", 2, 2, t22)
    trc = build_operator("Laplacian:A=1,B=1,convention=trace", 2, 2, t22)
    assert not op_equal(low, trc)
    g = sample_group_element(2, 2, "lap-m2")
    act = action_of(g, t22)
    assert invariance_check(low, act).ok


def test_noncommuting_det_rejected():
    base = build_base_matrices(N, M, T)
    with pytest.raises(NoncommutingEntriesError):
        (base.Y @ base.DY).det()
