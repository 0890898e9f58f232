"""The affine matrix group acting on the space, its Lie algebra, and the
orthogonal-invariant polynomials on the tangent space.

Group elements are pairs (g, lam) with g invertible n x n and lam an m x n
block; multiplication is (g1, lam1)(g2, lam2) = (g1 g2, lam1 t(g2^-1) + lam2),
and the action on a point (Y, V) is (g Y tg, (V + lam) tg).  Algebra elements
are pairs (X, Z) with bracket

    [(X1, Z1), (X2, Z2)] = ([X1, X2], Z2 tX1 - Z1 tX2).

The symmetric pairs (X symmetric) form the tangent space at the base point;
the compact subgroup O(n) acts on it by k.(X, Z) = (k X tk, Z tk), and the
polynomial invariants of that action are the inputs of the local-to-global
operator correspondence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .matrices import Mat
from .polynomials import (
    Polynomial,
    VariableTable,
    algebra_table,
    sym_pairs,
    v_name,
    x_name,
    y_name,
    z_name,
)
from .weyl import ActionMap


def seeded_rng(*parts) -> random.Random:
    """Deterministic RNG from any printable seed parts (stable across runs)."""
    return random.Random("/".join(str(p) for p in parts))


def rand_fraction(rng: random.Random, height: int = 5) -> Fraction:
    return Fraction(rng.randint(-height, height), rng.randint(1, height))


def rand_matrix(rng, rows, cols, height=5) -> Mat:
    return Mat(rows, cols, [[rand_fraction(rng, height) for _ in range(cols)]
                            for _ in range(rows)])


def rand_invertible(rng, n, height=5) -> Mat:
    while True:
        g = rand_matrix(rng, n, n, height)
        if g.det() != 0:
            return g


def rand_symmetric(rng, n, height=5) -> Mat:
    entries = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            r = rand_fraction(rng, height)
            entries[i][j] = entries[j][i] = r
    return Mat(n, n, entries)


def rand_skew(rng, n, height=5) -> Mat:
    entries = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            r = rand_fraction(rng, height)
            entries[i][j] = r
            entries[j][i] = -r
    return Mat(n, n, entries)


@dataclass(frozen=True)
class Point:
    """A point (Y, V): Y symmetric positive definite n x n, V an m x n block."""

    Y: Mat
    V: Mat

    def __post_init__(self):
        n = self.Y.rows
        if self.Y.cols != n:
            raise ValueError("Y must be square")
        if self.V.cols != n:
            raise ValueError(f"V must have {n} columns")
        if not self.Y.is_symmetric():
            raise ValueError("Y must be symmetric")
        if not all(d > 0 for d in self.Y.leading_principal_minors()):
            raise ValueError("Y must be positive definite")

    @property
    def n(self):
        return self.Y.rows

    @property
    def m(self):
        return self.V.rows

    def coordinates(self) -> dict:
        """Coordinate values keyed by variable name (y_i_j for i<=j, v_k_l)."""
        n, m = self.n, self.m
        out = {}
        for (i, j) in sym_pairs(n):
            out[y_name(i, j)] = self.Y[i - 1, j - 1]
        for k in range(1, m + 1):
            for l in range(1, n + 1):
                out[v_name(k, l)] = self.V[k - 1, l - 1]
        return out

    @classmethod
    def base(cls, n: int, m: int):
        return cls(Mat.eye(n), Mat.zeros(m, n))


@dataclass(frozen=True)
class GroupElement:
    g: Mat
    lam: Mat

    def __post_init__(self):
        n = self.g.rows
        if self.g.cols != n:
            raise ValueError("g must be square")
        if self.lam.cols != n:
            raise ValueError(f"lam must have {n} columns")
        if self.g.det() == 0:
            raise ValueError("g must be invertible")

    @property
    def n(self):
        return self.g.rows

    @property
    def m(self):
        return self.lam.rows

    @classmethod
    def identity(cls, n: int, m: int):
        return cls(Mat.eye(n), Mat.zeros(m, n))

    def mul(self, other: "GroupElement") -> "GroupElement":
        if self.n != other.n or self.m != other.m:
            raise ValueError("size mismatch")
        return GroupElement(self.g @ other.g,
                            self.lam @ other.g.inv().T + other.lam)

    def __matmul__(self, other):
        return self.mul(other)

    def inv(self) -> "GroupElement":
        gi = self.g.inv()
        return GroupElement(gi, (-self.lam) @ self.g.T)

    def act(self, p: Point) -> Point:
        Y = self.g @ p.Y @ self.g.T
        V = (p.V + self.lam) @ self.g.T
        return Point(Y, V)


@dataclass(frozen=True)
class AlgebraElement:
    X: Mat
    Z: Mat

    def __post_init__(self):
        n = self.X.rows
        if self.X.cols != n or self.Z.cols != n:
            raise ValueError("size mismatch between X and Z")

    @property
    def n(self):
        return self.X.rows

    @property
    def m(self):
        return self.Z.rows

    def add(self, other):
        return AlgebraElement(self.X + other.X, self.Z + other.Z)

    def scale(self, c):
        return AlgebraElement(self.X.scale(c), self.Z.scale(c))


def bracket(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    X = a.X @ b.X - b.X @ a.X
    Z = b.Z @ a.X.T - a.Z @ b.X.T
    return AlgebraElement(X, Z)


def adstar(gl: GroupElement, x: AlgebraElement) -> AlgebraElement:
    """Adjoint action of the group on its Lie algebra."""
    gi = gl.g.inv()
    X = gl.g @ x.X @ gi
    Z = (x.Z - gl.lam @ x.X.T) @ gl.g.T
    return AlgebraElement(X, Z)


def gstar_basis(n: int, m: int):
    """Basis of the full Lie algebra: matrix units E_ij row-major, then e_kl."""
    basis = []
    for i in range(n):
        for j in range(n):
            X = Mat(n, n, [[Fraction(1) if (r, c) == (i, j) else Fraction(0)
                            for c in range(n)] for r in range(n)])
            basis.append(AlgebraElement(X, Mat.zeros(m, n)))
    for k in range(m):
        for l in range(n):
            Z = Mat(m, n, [[Fraction(1) if (r, c) == (k, l) else Fraction(0)
                            for c in range(n)] for r in range(m)])
            basis.append(AlgebraElement(Mat.zeros(n, n), Z))
    return basis


def pstar_basis(n: int, m: int):
    """Basis of the symmetric-X subspace, with its diagonal Gram entries.

    Order: E_ii / (E_ij + E_ji) over index pairs i <= j lexicographically,
    then the Z matrix units row-major.  Returns (elements, gram_diagonal)
    where the Gram entries tr(X^2) + tr(Z tZ) are 1, 2, 1 respectively.
    """
    els = []
    gram = []
    for (i, j) in sym_pairs(n):
        entries = [[Fraction(0)] * n for _ in range(n)]
        entries[i - 1][j - 1] = Fraction(1)
        entries[j - 1][i - 1] = Fraction(1)
        els.append(AlgebraElement(Mat(n, n, entries), Mat.zeros(m, n)))
        gram.append(Fraction(1) if i == j else Fraction(2))
    for k in range(m):
        for l in range(n):
            Z = Mat(m, n, [[Fraction(1) if (r, c) == (k, l) else Fraction(0)
                            for c in range(n)] for r in range(m)])
            els.append(AlgebraElement(Mat.zeros(n, n), Z))
            gram.append(Fraction(1))
    return els, gram


def _algebra_coords(x: AlgebraElement):
    n, m = x.n, x.m
    out = []
    for i in range(n):
        for j in range(n):
            out.append(x.X[i, j])
    for k in range(m):
        for l in range(n):
            out.append(x.Z[k, l])
    return out


def ad_matrix(x: AlgebraElement) -> Mat:
    """Matrix of ad(x) = [x, .] over the gstar basis."""
    basis = gstar_basis(x.n, x.m)
    cols = [_algebra_coords(bracket(x, b)) for b in basis]
    dim = len(basis)
    return Mat(dim, dim, [[cols[j][i] for j in range(dim)] for i in range(dim)])


def killing_trace(a: AlgebraElement, b: AlgebraElement) -> Fraction:
    """Killing form computed honestly as tr(ad(a) ad(b))."""
    return (ad_matrix(a) @ ad_matrix(b)).trace()


def killing_closed(a: AlgebraElement, b: AlgebraElement) -> Fraction:
    """Closed form (2n + m) tr(X1 X2) - 2 tr(X1) tr(X2)."""
    n, m = a.n, a.m
    t12 = (a.X @ b.X).trace()
    return (2 * n + m) * t12 - 2 * a.X.trace() * b.X.trace()


def jacobi_defect(a, b, c) -> AlgebraElement:
    """[[a,b],c] + [[b,c],a] + [[c,a],b]; zero iff the Jacobi identity holds."""
    s1 = bracket(bracket(a, b), c)
    s2 = bracket(bracket(b, c), a)
    s3 = bracket(bracket(c, a), b)
    return AlgebraElement(s1.X + s2.X + s3.X, s1.Z + s2.Z + s3.Z)


# -- the orthogonal subgroup -----------------------------------------------------


def cayley(a: Mat) -> Mat:
    """Cayley transform (I - A)(I + A)^-1 of a skew matrix: special orthogonal."""
    if not a.is_skew():
        raise ValueError("Cayley transform needs a skew-symmetric matrix")
    n = a.rows
    eye = Mat.eye(n)
    return (eye - a) @ (eye + a).inv()


def k_sample(n: int, seed, component: str = "plus", height: int = 5) -> Mat:
    """Seeded rational orthogonal matrix; component 'minus' gives determinant -1."""
    rng = seeded_rng("k-sample", n, component, seed)
    k = cayley(rand_skew(rng, n, height))
    if component == "plus":
        return k
    if component == "minus":
        flip = Mat.diag([Fraction(-1)] + [Fraction(1)] * (n - 1))
        return k @ flip
    raise ValueError("component must be 'plus' or 'minus'")


def sample_group_element(n: int, m: int, seed, height: int = 3) -> GroupElement:
    rng = seeded_rng("group-sample", n, m, seed)
    g = rand_invertible(rng, n, height)
    lam = rand_matrix(rng, m, n, height)
    return GroupElement(g, lam)


def sample_point(n: int, m: int, seed, height: int = 3) -> Point:
    """Seeded rational point; Y is built as g tg so positivity is automatic."""
    rng = seeded_rng("point-sample", n, m, seed)
    g = rand_invertible(rng, n, height)
    v = rand_matrix(rng, m, n, height)
    return Point(g @ g.T, v)


# -- symbolic matrices over tables ------------------------------------------------


def sym_coordinate_matrix(table: VariableTable, n: int, namer=y_name) -> Mat:
    """Symmetric n x n matrix whose (i, j) entry is the variable named by namer."""
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            row.append(Polynomial.variable(table, namer(a, b)))
        rows.append(row)
    return Mat(n, n, rows)


def block_coordinate_matrix(table: VariableTable, m: int, n: int, namer=v_name) -> Mat:
    return Mat(m, n, [[Polynomial.variable(table, namer(k, l))
                       for l in range(1, n + 1)] for k in range(1, m + 1)])


def half_coordinate_matrix(table: VariableTable, n: int, namer=x_name) -> Mat:
    """Symmetric matrix with x_ii on the diagonal and x_ij/2 off the diagonal."""
    rows = []
    half = Fraction(1, 2)
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            p = Polynomial.variable(table, namer(a, b))
            row.append(p if i == j else p * half)
        rows.append(row)
    return Mat(n, n, rows)


def action_of(gl: GroupElement, table: VariableTable) -> ActionMap:
    """The pullback substitution of the group action on coordinates."""
    n, m = gl.n, gl.m
    zero = Polynomial.zero(table)

    def bindings_for(el: GroupElement):
        Ymat = sym_coordinate_matrix(table, n)
        gp = el.g.map(lambda c: Polynomial.constant(table, c))
        Yim = gp.mul(Ymat, zero).mul(gp.T, zero)
        binds = []
        for (i, j) in sym_pairs(n):
            binds.append(Yim[i - 1, j - 1])
        if m:
            Vmat = block_coordinate_matrix(table, m, n)
            lamp = el.lam.map(lambda c: Polynomial.constant(table, c))
            Vim = (Vmat + lamp).mul(gp.T, zero)
            for k in range(1, m + 1):
                for l in range(1, n + 1):
                    binds.append(Vim[k - 1, l - 1])
        return binds

    return ActionMap(table, bindings_for(gl), bindings_for(gl.inv()))


# -- invariant polynomials on the tangent space -----------------------------------


INVARIANT_FAMILIES = ("p", "q", "xi", "R", "MS", "QS", "RS")


@dataclass(frozen=True)
class InvariantPolynomial:
    """A polynomial on the tangent space, invariant under the orthogonal action.

    The body lives over algebra_table(n, m) in the coordinates x_i_j (i <= j,
    with the matrix convention X_ii = x_ii, X_ij = x_ij / 2) and z_k_l.
    """

    family: str
    indices: tuple
    n: int
    m: int
    body: Polynomial
    degree: int
    s_matrix: Mat | None = None

    def __str__(self):
        idx = ",".join(str(i) for i in self.indices)
        s = f"{self.family}[{idx}] (n={self.n}, m={self.m})"
        return s


def invariant_poly_build(family: str, n: int, m: int, indices=(), S: Mat = None,
                         verify: bool = True, verify_samples: int = 2,
                         seed=0) -> InvariantPolynomial:
    """Builds one of the invariant polynomial families.

    Families and their index ranges:
      p[j], 1<=j<=n:        tr(X^j)
      q[p,q], p<=q<=m:      (Z tZ)_pq
      xi[p,q], p<=q<=m:     (Z X tZ)_pq
      R[j,p]:               tr(X^j (tZ Z)^p)
      MS[j] (S):            tr((X + tZ S Z)^j)
      QS[p] (S):            tr((tZ S Z)^p)
      RS[i,p,j] (S):        tr(X^i (tZ S Z)^p (X + tZ S Z)^j)
    """
    table = algebra_table(n, m)
    zero = Polynomial.zero(table)
    indices = tuple(int(i) for i in indices)
    X = half_coordinate_matrix(table, n)
    Z = block_coordinate_matrix(table, m, n, namer=z_name) if m else Mat(0, n, [])

    def checked(name, val, lo, hi):
        if not (lo <= val <= hi):
            raise ValueError(f"index {name}={val} out of range [{lo}, {hi}] "
                             f"for family {family!r} at n={n}, m={m}")
        return val

    def matpow(mat, k):
        out = Mat.eye(n, Polynomial.one(table), zero)
        for _ in range(k):
            out = out.mul(mat, zero)
        return out

    def tZSZ():
        if S is None:
            raise ValueError(f"family {family!r} needs the matrix S")
        if S.rows != m or S.cols != m:
            raise ValueError(f"S must be {m}x{m}")
        if not S.is_symmetric():
            raise ValueError("S must be symmetric")
        if m == 0:
            return Mat.zeros(n, n, zero)
        Sp = S.map(lambda c: Polynomial.constant(table, c))
        return Z.T.mul(Sp, zero).mul(Z, zero)

    if family == "p":
        (j,) = indices
        checked("j", j, 1, n)
        body = matpow(X, j).trace(zero)
    elif family == "q":
        p, q = indices
        checked("p", p, 1, m)
        checked("q", q, p, m)
        body = Z.mul(Z.T, zero)[p - 1, q - 1]
    elif family == "xi":
        p, q = indices
        checked("p", p, 1, m)
        checked("q", q, p, m)
        body = Z.mul(X, zero).mul(Z.T, zero)[p - 1, q - 1]
    elif family == "R":
        j, p = indices
        checked("j", j, 1, n)
        checked("p", p, 1, m)
        tZZ = Z.T.mul(Z, zero)
        body = matpow(X, j).mul(matpow(tZZ, p), zero).trace(zero)
    elif family == "MS":
        (j,) = indices
        checked("j", j, 1, n)
        body = matpow(X + tZSZ(), j).trace(zero)
    elif family == "QS":
        (p,) = indices
        checked("p", p, 1, m)
        body = matpow(tZSZ(), p).trace(zero)
    elif family == "RS":
        i, p, j = indices
        checked("i", i, 1, n)
        checked("p", p, 1, m)
        checked("j", j, 1, n)
        W = tZSZ()
        body = matpow(X, i).mul(matpow(W, p), zero).mul(matpow(X + W, j), zero).trace(zero)
    else:
        raise ValueError(f"unknown invariant family {family!r}; "
                         f"known: {', '.join(INVARIANT_FAMILIES)}")

    ip = InvariantPolynomial(family, indices, n, m, body, body.total_degree(),
                             s_matrix=S)
    if verify:
        ok, report = k_invariance_check(ip, samples=verify_samples, seed=seed)
        if not ok:
            raise AssertionError(f"built {family} is not K-invariant: {report}")
    return ip


def _k_substitution(table, n, m, k: Mat) -> dict:
    """Bindings for P -> P(k X tk, Z tk) in the half-matrix coordinates."""
    X = half_coordinate_matrix(table, n)
    kp = k.map(lambda c: Polynomial.constant(table, c))
    zero = Polynomial.zero(table)
    M = kp.mul(X, zero).mul(kp.T, zero)
    binds = {}
    for (i, j) in sym_pairs(n):
        e = M[i - 1, j - 1]
        binds[x_name(i, j)] = e if i == j else e * 2
    if m:
        Z = block_coordinate_matrix(table, m, n, namer=z_name)
        Zim = Z.mul(kp.T, zero)
        for kk in range(1, m + 1):
            for l in range(1, n + 1):
                binds[z_name(kk, l)] = Zim[kk - 1, l - 1]
    return binds


def k_invariance_check(ip: InvariantPolynomial, samples: int = 5, seed=0):
    """Exact invariance of the body under sampled elements of both O(n) pieces."""
    table = ip.body.table
    for component in ("plus", "minus"):
        for s in range(samples):
            k = k_sample(ip.n, seed=f"{seed}:{s}", component=component)
            binds = _k_substitution(table, ip.n, ip.m, k)
            moved = ip.body.subst(binds)
            if moved != ip.body:
                return False, (f"fails for component {component}, sample {s}: "
                               f"difference {moved - ip.body}")
    return True, f"invariant under {samples} sampled elements per component"
