"""Exact dense matrices with explicit shapes.

Entries are Fractions for group/geometry arithmetic, but any commutative-ring
elements supporting ``+``, ``-``, ``*`` work (polynomials, rational
functions).  Shapes are carried explicitly so that zero-row/zero-column
matrices (the m = 0 degenerations) behave correctly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

_F0 = Fraction(0)
_F1 = Fraction(1)


class ShapeError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


class InconsistentSystemError(ArithmeticError):
    pass


class UnderdeterminedSystemError(ArithmeticError):
    pass


class Mat:
    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries):
        entries = tuple(tuple(r) for r in entries)
        if len(entries) != rows or any(len(r) != cols for r in entries):
            raise ShapeError(f"entries do not match shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.entries = entries

    @classmethod
    def from_rows(cls, rows_list):
        rows_list = [list(r) for r in rows_list]
        r = len(rows_list)
        c = len(rows_list[0]) if r else 0
        return cls(r, c, rows_list)

    @classmethod
    def zeros(cls, r: int, c: int, zero=_F0):
        return cls(r, c, [[zero] * c for _ in range(r)])

    @classmethod
    def eye(cls, n: int, one=_F1, zero=_F0):
        return cls(n, n, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, values, zero=_F0):
        values = list(values)
        n = len(values)
        return cls(n, n, [[values[i] if i == j else zero for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i):
        return self.entries[i]

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(" ".join(str(e) for e in r) for r in self.entries)
        return f"Mat({self.rows}x{self.cols}: {body})"

    def __add__(self, other):
        self._same_shape(other)
        return Mat(self.rows, self.cols,
                   [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._same_shape(other)
        return Mat(self.rows, self.cols,
                   [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __neg__(self):
        return Mat(self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def _same_shape(self, other):
        if self.rows != other.rows or self.cols != other.cols:
            raise ShapeError(f"shape mismatch {self.rows}x{self.cols} vs {other.rows}x{other.cols}")

    def scale(self, s):
        return Mat(self.rows, self.cols, [[a * s for a in r] for r in self.entries])

    def mul(self, other: "Mat", zero=_F0):
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        inner = self.cols
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                if inner == 0:
                    row.append(zero)
                    continue
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, inner):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return Mat(self.rows, other.cols, out)

    def __matmul__(self, other):
        return self.mul(other)

    @property
    def T(self):
        return Mat(self.cols, self.rows,
                   [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def trace(self, zero=_F0):
        if self.rows != self.cols:
            raise ShapeError("trace of a non-square matrix")
        acc = zero
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def map(self, fn):
        return Mat(self.rows, self.cols, [[fn(a) for a in r] for r in self.entries])

    def is_symmetric(self):
        return self.rows == self.cols and all(
            self.entries[i][j] == self.entries[j][i]
            for i in range(self.rows) for j in range(i + 1, self.cols))

    def is_skew(self):
        if self.rows != self.cols:
            return False
        for i in range(self.rows):
            if self.entries[i][i] != 0:
                return False
            for j in range(i + 1, self.cols):
                if self.entries[i][j] != -self.entries[j][i]:
                    return False
        return True

    def det(self, zero=_F0):
        """Determinant by signed permutation expansion (square, small sizes)."""
        if self.rows != self.cols:
            raise ShapeError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return _F1 if zero == _F0 else zero + _F1  # empty product convention
        acc = None
        for perm in itertools.permutations(range(n)):
            sign = _perm_sign(perm)
            term = self.entries[0][perm[0]]
            for i in range(1, n):
                term = term * self.entries[i][perm[i]]
            if sign < 0:
                term = -term
            acc = term if acc is None else acc + term
        return acc

    def inv(self):
        """Inverse by Gauss-Jordan elimination; entries must support division."""
        if self.rows != self.cols:
            raise ShapeError("inverse of a non-square matrix")
        n = self.rows
        a = [list(r) for r in self.entries]
        if n == 0:
            return Mat(0, 0, [])
        one = a[0][0] - a[0][0] + _F1 if isinstance(a[0][0], Fraction) else None
        aug = [row + [(_F1 if i == j else _F0) for j in range(n)] for i, row in enumerate(a)] \
            if one is not None else None
        if aug is None:
            # generic entries: delegate to adjugate/determinant
            d = self.det()
            if not d:
                raise SingularMatrixError("matrix is singular")
            return self.adjugate().map(lambda e: e / d)
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular")
            aug[col], aug[piv] = aug[piv], aug[col]
            pv = aug[col][col]
            aug[col] = [e / pv for e in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    f = aug[r][col]
                    aug[r] = [e - f * p for e, p in zip(aug[r], aug[col])]
        return Mat(n, n, [row[n:] for row in aug])

    def adjugate(self):
        n = self.rows
        if n == 0:
            return Mat(0, 0, [])
        cof = []
        for i in range(n):
            row = []
            for j in range(n):
                minor = Mat(n - 1, n - 1,
                            [[self.entries[r][c] for c in range(n) if c != j]
                             for r in range(n) if r != i])
                mdet = minor.det()
                row.append(mdet if (i + j) % 2 == 0 else -mdet)
            cof.append(row)
        return Mat(n, n, cof).T

    def leading_principal_minors(self):
        if self.rows != self.cols:
            raise ShapeError("principal minors of a non-square matrix")
        out = []
        for k in range(1, self.rows + 1):
            sub = Mat(k, k, [r[:k] for r in self.entries[:k]])
            out.append(sub.det())
        return out

    def is_positive_definite(self):
        return self.is_symmetric() and all(d > 0 for d in self.leading_principal_minors())


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign


def solve_exact(a_rows, rhs_rows):
    """Solve A x = b exactly for each right-hand-side column, over Fractions.

    ``a_rows`` is a list of equation rows (possibly more rows than unknowns);
    ``rhs_rows`` is a list of right-hand-side rows aligned with them (each a
    list, one entry per system).  Raises InconsistentSystemError when no
    solution exists and UnderdeterminedSystemError when the solution is not
    unique.  Returns a list of solution columns.
    """
    nrows = len(a_rows)
    ncols = len(a_rows[0]) if nrows else 0
    nrhs = len(rhs_rows[0]) if nrows else 0
    aug = [list(map(Fraction, a_rows[i])) + list(map(Fraction, rhs_rows[i])) for i in range(nrows)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if aug[i][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        pv = aug[r][c]
        aug[r] = [e / pv for e in aug[r]]
        for i in range(nrows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [e - f * p for e, p in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    for i in range(r, nrows):
        if any(aug[i][ncols:]):
            raise InconsistentSystemError("no exact solution: inconsistent system")
    if len(pivots) < ncols:
        missing = sorted(set(range(ncols)) - set(pivots))
        raise UnderdeterminedSystemError(
            f"solution not unique: free columns {missing}; add sample points")
    sols = []
    for k in range(nrhs):
        col = [Fraction(0)] * ncols
        for row_idx, c in enumerate(pivots):
            col[c] = aug[row_idx][ncols + k]
        sols.append(col)
    return sols
