"""Matrix calculus over operator entries and the named operator families.

Everything here is assembled from four base matrices: Y (multiplication by
the symmetric coordinates), DY (the symmetric-derivative matrix whose off
diagonal entries carry a factor 1/2), V, and DV (plain derivatives in the
block coordinates).  Products of operator matrices preserve the printed
left-to-right entry order; reordering would change lower-order terms.

Determinants are only defined when the entries pairwise commute, which holds
for constant-coefficient matrices like DY + c * t(DV) M^-1 DV; the check is
performed entry by entry and failures name the offending pair.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .matrices import Mat, ShapeError, SingularMatrixError, _perm_sign
from .polynomials import (
    Polynomial,
    RationalFunction,
    VariableTable,
    coordinate_table,
    v_name,
    y_name,
)
from .weyl import DiffOperator, op_commutator, op_compose


class NoncommutingEntriesError(ValueError):
    pass


class OperatorMatrix:
    """Rectangular matrix of differential operators over one variable table."""

    __slots__ = ("table", "rows", "cols", "entries")

    def __init__(self, table: VariableTable, entries):
        entries = tuple(tuple(row) for row in entries)
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        for row in entries:
            if len(row) != cols:
                raise ShapeError("ragged operator matrix")
            for e in row:
                if not isinstance(e, DiffOperator):
                    raise TypeError(f"entry {e!r} is not a DiffOperator")
                if e.table != table:
                    raise ValueError("entry over a different variable table")
        self.table = table
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def zeros(cls, table, rows, cols):
        z = DiffOperator.zero(table)
        return cls(table, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, table, n):
        one = DiffOperator.identity(table)
        z = DiffOperator.zero(table)
        return cls(table, [[one if i == j else z for j in range(n)]
                           for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return (isinstance(other, OperatorMatrix) and self.table == other.table
                and self.entries == other.entries)

    def __add__(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError("shape mismatch in operator matrix sum")
        return OperatorMatrix(self.table, [
            [self.entries[i][j] + other.entries[i][j] for j in range(self.cols)]
            for i in range(self.rows)])

    def __sub__(self, other):
        return self + other.scale(Fraction(-1))

    def scale(self, c):
        return OperatorMatrix(self.table, [[e.scale(c) for e in row]
                                           for row in self.entries])

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} "
                             f"by {other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = DiffOperator.zero(self.table)
                for k in range(self.cols):
                    acc = acc + op_compose(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return OperatorMatrix(self.table, out)

    @property
    def T(self):
        return OperatorMatrix(self.table, [
            [self.entries[i][j] for i in range(self.rows)]
            for j in range(self.cols)])

    def trace(self) -> DiffOperator:
        if self.rows != self.cols:
            raise ShapeError("trace of a non-square operator matrix")
        acc = DiffOperator.zero(self.table)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def power(self, k: int) -> "OperatorMatrix":
        if self.rows != self.cols:
            raise ShapeError("power of a non-square operator matrix")
        if k < 0:
            raise ValueError("negative power")
        out = OperatorMatrix.identity(self.table, self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def check_commuting(self):
        """Raises NoncommutingEntriesError naming the first offending pair."""
        flat = [(i, j, self.entries[i][j]) for i in range(self.rows)
                for j in range(self.cols)]
        for a in range(len(flat)):
            for b in range(a + 1, len(flat)):
                i1, j1, e1 = flat[a]
                i2, j2, e2 = flat[b]
                if not op_commutator(e1, e2).is_zero():
                    raise NoncommutingEntriesError(
                        f"entries ({i1},{j1}) and ({i2},{j2}) do not commute; "
                        f"determinant is not defined")

    def det(self) -> DiffOperator:
        if self.rows != self.cols:
            raise ShapeError("determinant of a non-square operator matrix")
        self.check_commuting()
        n = self.rows
        acc = DiffOperator.zero(self.table)
        for perm in permutations(range(n)):
            term = DiffOperator.identity(self.table)
            for i in range(n):
                term = op_compose(term, self.entries[i][perm[i]])
            if _perm_sign(perm) < 0:
                term = term.scale(Fraction(-1))
            acc = acc + term
        return acc


@dataclass(frozen=True)
class BaseMatrices:
    table: VariableTable
    Y: OperatorMatrix
    DY: OperatorMatrix
    V: OperatorMatrix
    DV: OperatorMatrix


def build_base_matrices(n: int, m: int, table: VariableTable | None = None) -> BaseMatrices:
    """The four matrices every operator family is assembled from."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    if table is None:
        table = coordinate_table(n, m)
    half = Fraction(1, 2)
    yrows, drows = [], []
    for i in range(1, n + 1):
        yr, dr = [], []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            name = y_name(a, b)
            yr.append(DiffOperator.mult(Polynomial.variable(table, name)))
            coeff = Fraction(1) if i == j else half
            dr.append(DiffOperator.partial(table, {name: 1}, coeff=coeff))
        yrows.append(yr)
        drows.append(dr)
    Y = OperatorMatrix(table, yrows)
    DY = OperatorMatrix(table, drows)
    if m == 0:
        V = _empty_block(table, 0, n)
        DV = _empty_block(table, 0, n)
        return BaseMatrices(table, Y, DY, V, DV)
    vrows, dvrows = [], []
    for k in range(1, m + 1):
        vr, dvr = [], []
        for l in range(1, n + 1):
            name = v_name(k, l)
            vr.append(DiffOperator.mult(Polynomial.variable(table, name)))
            dvr.append(DiffOperator.partial(table, {name: 1}))
        vrows.append(vr)
        dvrows.append(dvr)
    return BaseMatrices(table, Y, DY, OperatorMatrix(table, vrows),
                        OperatorMatrix(table, dvrows))


def _empty_block(table, rows, cols):
    """Operator matrix with a zero dimension; __init__ cannot infer its cols."""
    em = OperatorMatrix.__new__(OperatorMatrix)
    em.table = table
    em.rows = rows
    em.cols = cols
    em.entries = ()
    return em


OPERATOR_FAMILIES = ("SelbergD", "D", "Psi", "Delta", "L", "S", "Phi", "LS",
                     "PhiIPJ", "M", "Laplacian")


@dataclass(frozen=True)
class OperatorSpec:
    """Parsed description of one operator family instance.

    Text form: family name, then ':' and comma-separated index assignments,
    then optional ';'-separated matrix parameters, e.g.

        "D:j=2"
        "Psi:p=1,q=1"
        "Phi:j=1;S=[[1]]"
        "M;M=[[2,1],[1,2]]"
        "Laplacian:A=1,B=1,convention=trace"

    Matrix entries are integers or rationals like 3/2.  For the Laplacian,
    A and B may be omitted to keep them as the formal parameters A and B.
    """

    family: str
    indices: dict = field(default_factory=dict)
    s_matrix: Mat | None = None
    m_matrix: Mat | None = None
    a_value: Fraction | None = None
    b_value: Fraction | None = None
    convention: str = "lower"

    def text(self) -> str:
        assigns = [f"{k}={v}" for k, v in sorted(self.indices.items())]
        if self.family == "Laplacian":
            if self.a_value is not None:
                assigns.append(f"A={self.a_value}")
            if self.b_value is not None:
                assigns.append(f"B={self.b_value}")
            assigns.append(f"convention={self.convention}")
        head = self.family
        if assigns:
            head += ":" + ",".join(assigns)
        for tag, mat in (("S", self.s_matrix), ("M", self.m_matrix)):
            if mat is not None:
                rows = ",".join("[" + ",".join(str(x) for x in row) + "]"
                                for row in mat.entries)
                head += f";{tag}=[{rows}]"
        return head


_RAT = re.compile(r"^-?\d+(/\d+)?$")


def _parse_rational(tok: str) -> Fraction:
    tok = tok.strip()
    if not _RAT.match(tok):
        raise ValueError(f"not a rational literal: {tok!r}")
    return Fraction(tok)


def _parse_matrix(text: str) -> Mat:
    text = text.strip()
    if not (text.startswith("[[") and text.endswith("]]")):
        raise ValueError(f"matrix literal must look like [[a,b],[c,d]]: {text!r}")
    inner = text[2:-2]
    rows = re.split(r"\]\s*,\s*\[", inner)
    entries = [[_parse_rational(x) for x in row.split(",")] for row in rows]
    cols = len(entries[0])
    if any(len(r) != cols for r in entries):
        raise ValueError("ragged matrix literal")
    return Mat(len(entries), cols, entries)


def parse_operator_spec(text: str) -> OperatorSpec:
    segments = [s for s in text.strip().split(";") if s]
    if not segments:
        raise ValueError("empty operator spec")
    head = segments[0]
    if ":" in head:
        family, assigns = head.split(":", 1)
    else:
        family, assigns = head, ""
    family = family.strip()
    if family not in OPERATOR_FAMILIES:
        raise ValueError(f"unknown operator family {family!r}; "
                         f"known: {', '.join(OPERATOR_FAMILIES)}")
    indices = {}
    a_value = b_value = None
    convention = "lower"
    if assigns.strip():
        for pair in assigns.split(","):
            if "=" not in pair:
                raise ValueError(f"expected key=value, got {pair!r}")
            key, val = (x.strip() for x in pair.split("=", 1))
            if family == "Laplacian" and key in ("A", "B"):
                if key == "A":
                    a_value = _parse_rational(val)
                else:
                    b_value = _parse_rational(val)
            elif family == "Laplacian" and key == "convention":
                convention = val
            else:
                indices[key] = int(val)
    s_matrix = m_matrix = None
    for seg in segments[1:]:
        if "=" not in seg:
            raise ValueError(f"expected S=... or M=..., got {seg!r}")
        key, val = (x.strip() for x in seg.split("=", 1))
        if key == "S":
            s_matrix = _parse_matrix(val)
        elif key == "M":
            m_matrix = _parse_matrix(val)
        else:
            raise ValueError(f"unknown matrix parameter {key!r}")
    if convention not in ("lower", "trace"):
        raise ValueError(f"unknown convention {convention!r}; use lower or trace")
    return OperatorSpec(family, indices, s_matrix, m_matrix, a_value, b_value,
                        convention)


def _need(indices: dict, family: str, *names):
    missing = [k for k in names if k not in indices]
    if missing:
        raise ValueError(f"family {family!r} needs indices {', '.join(names)}")
    extra = [k for k in indices if k not in names]
    if extra:
        raise ValueError(f"family {family!r} does not take {', '.join(extra)}")
    return [indices[k] for k in names]


def _check_range(name, val, lo, hi):
    if not (lo <= val <= hi):
        raise ValueError(f"index {name}={val} out of range [{lo}, {hi}]")
    return val


def _embed_s(table, S: Mat, m: int) -> OperatorMatrix:
    if S.rows != m or S.cols != m:
        raise ValueError(f"S must be {m}x{m}, got {S.rows}x{S.cols}")
    if not S.is_symmetric():
        raise ValueError("S must be symmetric")
    return OperatorMatrix(table, [
        [DiffOperator.mult(Polynomial.constant(table, S[i, j]))
         for j in range(m)] for i in range(m)]) if m else _empty_block(table, 0, 0)


def build_operator(spec: OperatorSpec | str, n: int, m: int,
                   table: VariableTable | None = None) -> DiffOperator:
    """Assembles one named operator family member over coordinate_table(n, m)."""
    if isinstance(spec, str):
        spec = parse_operator_spec(spec)
    base = build_base_matrices(n, m, table)
    table = base.table
    Y, DY, V, DV = base.Y, base.DY, base.V, base.DV
    fam = spec.family
    idx = dict(spec.indices)

    def two_y_dy():
        return (Y @ DY).scale(Fraction(2))

    def y_tdv_dv():
        # {Y t(DV) DV}: n x n, zero when m = 0
        if m == 0:
            return OperatorMatrix.zeros(table, n, n)
        return Y @ DV.T @ DV

    def y_tdv_s_dv(S):
        if m == 0:
            return OperatorMatrix.zeros(table, n, n)
        return Y @ DV.T @ _embed_s(table, S, m) @ DV

    def tdv_s_dv(S):
        if m == 0:
            return OperatorMatrix.zeros(table, n, n)
        return DV.T @ _embed_s(table, S, m) @ DV

    if fam == "SelbergD":
        (i,) = _need(idx, fam, "i")
        _check_range("i", i, 1, n)
        return (Y @ DY).power(i).trace()

    if fam == "D":
        (j,) = _need(idx, fam, "j")
        _check_range("j", j, 1, n)
        return two_y_dy().power(j).trace()

    if fam == "Psi":
        p, q = _need(idx, fam, "p", "q")
        _check_range("p", p, 1, m)
        _check_range("q", q, p, m)
        return (DV @ Y @ DV.T)[p - 1, q - 1]

    if fam == "Delta":
        p, q = _need(idx, fam, "p", "q")
        _check_range("p", p, 1, m)
        _check_range("q", q, p, m)
        return (DV @ two_y_dy() @ Y @ DV.T)[p - 1, q - 1]

    if fam == "L":
        (p,) = _need(idx, fam, "p")
        _check_range("p", p, 1, m)
        return y_tdv_dv().power(p).trace()

    if fam == "S":
        j, p = _need(idx, fam, "j", "p")
        _check_range("j", j, 1, n)
        _check_range("p", p, 1, m)
        return (two_y_dy().power(j) @ y_tdv_dv().power(p)).trace()

    if fam == "Phi":
        (j,) = _need(idx, fam, "j")
        _check_range("j", j, 1, n)
        if m == 0:
            # the S-correction vanishes with no block coordinates: Phi = D
            inner = DY.scale(Fraction(2))
        else:
            if spec.s_matrix is None:
                raise ValueError("family 'Phi' needs the matrix parameter S")
            inner = DY.scale(Fraction(2)) + tdv_s_dv(spec.s_matrix)
        return (Y @ inner).power(j).trace()

    if fam == "LS":
        (p,) = _need(idx, fam, "p")
        _check_range("p", p, 1, m)
        if spec.s_matrix is None:
            raise ValueError("family 'LS' needs the matrix parameter S")
        return y_tdv_s_dv(spec.s_matrix).power(p).trace()

    if fam == "PhiIPJ":
        i, p, j = _need(idx, fam, "i", "p", "j")
        _check_range("i", i, 1, n)
        _check_range("p", p, 1, m)
        _check_range("j", j, 1, n)
        if spec.s_matrix is None:
            raise ValueError("family 'PhiIPJ' needs the matrix parameter S")
        S = spec.s_matrix
        inner = DY.scale(Fraction(2)) + tdv_s_dv(S)
        part1 = two_y_dy().power(i)
        part2 = y_tdv_s_dv(S).power(p)
        part3 = (Y @ inner).power(j)
        return (part1 @ part2 @ part3).trace()

    if fam == "M":
        if idx:
            raise ValueError("family 'M' takes no integer indices")
        Mmat = spec.m_matrix
        if Mmat is None:
            raise ValueError("family 'M' needs the matrix parameter M")
        if Mmat.rows != m or Mmat.cols != m:
            raise ValueError(f"M must be {m}x{m}")
        if not Mmat.is_symmetric():
            raise ValueError("M must be symmetric")
        if Mmat.det() == 0:
            raise SingularMatrixError("M must be invertible")
        pi = RationalFunction.variable(table, "pi")
        c = RationalFunction.constant(table, Fraction(1, 8)) / pi
        if m:
            minv = Mmat.inv().map(lambda e: DiffOperator.mult(
                Polynomial.constant(table, e)))
            minv_om = OperatorMatrix(table, minv.entries)
            corr = (DV.T @ minv_om @ DV).scale(c)
            arg = DY + corr
        else:
            arg = DY
        dety = _det_poly(table, n)
        return DiffOperator.mult(dety) * arg.det()

    if fam == "Laplacian":
        if idx:
            raise ValueError("family 'Laplacian' takes no integer indices")
        one = Polynomial.one(table)
        if spec.a_value is not None:
            inv_a = RationalFunction.constant(table, Fraction(1) / spec.a_value)
        else:
            inv_a = RationalFunction(one, Polynomial.variable(table, "A"))
        if spec.b_value is not None:
            inv_b = RationalFunction.constant(table, Fraction(1) / spec.b_value)
        else:
            inv_b = RationalFunction(one, Polynomial.variable(table, "B"))
        ydy = Y @ DY
        out = (ydy.power(2).trace()).scale(inv_a)
        if m:
            out = out + ydy.trace().scale(inv_a * Fraction(-m, 2))
            psi = DV @ Y @ DV.T
            acc = DiffOperator.zero(table)
            for k in range(m):
                for p in range(k, m):
                    if spec.convention == "trace" and k != p:
                        continue
                    acc = acc + psi[k, p]
            out = out + acc.scale(inv_b)
        return out

    raise ValueError(f"unknown operator family {fam!r}")


def _det_poly(table, n) -> Polynomial:
    """det Y as a polynomial over the coordinate table."""
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            row.append(Polynomial.variable(table, y_name(a, b)))
        rows.append(row)
    return Mat(n, n, rows).det(Polynomial.zero(table))
