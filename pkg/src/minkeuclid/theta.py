"""The local-to-global correspondence: from a K-invariant polynomial on the
tangent space to the invariant differential operator it generates.

The pipeline has three exact stages:

1.  exp_truncated: the group exponential of a t-linear tangent element,
    H(t) = sum X(t)^k / k!  and  Mu(t) = Z(t) sum (-X(t))^k / (k+1)!,
    truncated past a total t-degree bound.

2.  theta_local: move the base point by rep * exp(t), Taylor-expand a formal
    function there, and pair against the polynomial applied to d/dt.  The
    result is the operator's coefficient jet {beta -> c_beta} at one point.
    With our half-off-diagonal tangent coordinates the Gram correction of the
    pairing cancels exactly, so the polynomial acts literally by x -> d/dt.

3.  theta_closed: sample local symbols at seeded rational points, fit each
    coefficient as a polynomial in the coordinates (optionally divided by a
    power of det Y) through one shared exact linear solve, verify the fit on
    held-out points, and return the operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .grouplie import (
    GroupElement,
    InvariantPolynomial,
    Point,
    action_of,
    k_invariance_check,
    pstar_basis,
    sample_group_element,
)
from .matrices import (
    InconsistentSystemError,
    Mat,
    UnderdeterminedSystemError,
    solve_exact,
)
from .polynomials import (
    ROLE_JET,
    Polynomial,
    RationalFunction,
    Variable,
    VariableTable,
    coordinate_table,
    graded_exponents,
    mono_key,
    num_coords,
    sym_pairs,
    v_name,
    y_name,
)
from .weyl import DiffOperator, invariance_check


def jet_table(n: int, m: int) -> VariableTable:
    """One t-variable per tangent basis element, in basis order."""
    count = num_coords(n, m)
    return VariableTable([Variable(f"t_{a}", ROLE_JET)
                          for a in range(1, count + 1)])


@dataclass(frozen=True)
class PStarBasis:
    n: int
    m: int
    elements: tuple
    gram_diagonal: tuple

    @classmethod
    def build(cls, n: int, m: int) -> "PStarBasis":
        els, gram = pstar_basis(n, m)
        return cls(n, m, tuple(els), tuple(gram))

    @property
    def dim(self):
        return len(self.elements)


def canonical_linear_form(n: int, m: int, ttable: VariableTable | None = None):
    """X(t), Z(t) for the generic tangent element sum_a t_a eta_a."""
    if ttable is None:
        ttable = jet_table(n, m)
    slot = 0
    xrows = [[Polynomial.zero(ttable) for _ in range(n)] for _ in range(n)]
    for (i, j) in sym_pairs(n):
        t = Polynomial.variable(ttable, f"t_{slot + 1}")
        xrows[i - 1][j - 1] = t
        xrows[j - 1][i - 1] = t
        slot += 1
    zrows = []
    for k in range(m):
        row = []
        for l in range(n):
            row.append(Polynomial.variable(ttable, f"t_{slot + 1}"))
            slot += 1
        zrows.append(row)
    xt = Mat(n, n, xrows)
    zt = Mat(m, n, zrows) if m else Mat(m, n, [])
    return ttable, xt, zt


@dataclass(frozen=True)
class TruncatedGroupExp:
    degree: int
    H: Mat
    Mu: Mat


def exp_truncated(xt: Mat, zt: Mat, d: int) -> TruncatedGroupExp:
    """Group exponential of the t-linear element (X(t), Z(t)) modulo degree > d."""
    if d < 0:
        raise ValueError("truncation degree must be nonnegative")
    n = xt.rows
    if not xt.is_symmetric():
        raise ValueError("X(t) must be symmetric")
    sample = xt[0, 0]
    table = sample.table
    for mat in (xt, zt):
        for row in mat.entries:
            for p in row:
                if p.total_degree() > 1 or p.coefficient((0,) * table.width):
                    raise ValueError("entries must be linear forms in t with "
                                     "no constant term")
    zero = Polynomial.zero(table)
    one = Polynomial.one(table)
    idx = tuple(range(table.width))

    def trunc(mat: Mat) -> Mat:
        return mat.map(lambda p: p.truncate(idx, d))

    H = Mat.eye(n, one, zero)
    term = Mat.eye(n, one, zero)
    for k in range(1, d + 1):
        term = trunc(term.mul(xt, zero)).map(lambda p: p * Fraction(1, k))
        H = H + term
    if zt.rows:
        acc = Mat.eye(n, one, zero)
        power = Mat.eye(n, one, zero)
        for k in range(1, d):
            power = trunc(power.mul(xt, zero)).map(
                lambda p, k=k: p * Fraction(-1, 1))
            acc = acc + power.map(lambda p, k=k: p * Fraction(1, factorial(k + 1)))
        mu = trunc(zt.mul(acc, zero))
    else:
        mu = Mat(0, n, [])
    return TruncatedGroupExp(d, H, mu)


def moved_point(rep: GroupElement, texp: TruncatedGroupExp):
    """Coordinates of rep * exp(t) applied to the base point, as t-polynomials."""
    H, mu = texp.H, texp.Mu
    n = H.rows
    m = mu.rows
    table = H[0, 0].table
    zero = Polynomial.zero(table)
    idx = tuple(range(table.width))

    def trunc(mat: Mat) -> Mat:
        return mat.map(lambda p: p.truncate(idx, texp.degree))

    gp = rep.g.map(lambda c: Polynomial.constant(table, c))
    Yt = trunc(trunc(gp.mul(H, zero).mul(H.T, zero)).mul(gp.T, zero))
    if m:
        lamp = rep.lam.map(lambda c: Polynomial.constant(table, c))
        Vt = trunc((trunc(mu.mul(H.T, zero)) + lamp).mul(gp.T, zero))
    else:
        Vt = Mat(0, n, [])
    return Yt, Vt


@dataclass
class LocalSymbol:
    """Coefficients {beta -> value} of an operator sum c_beta d^beta frozen at
    one point; beta runs over coordinate multi-indices of length n(n+1)/2 + mn."""

    n: int
    m: int
    point: Point
    coeffs: dict
    degree: int

    def sorted_items(self):
        return sorted(self.coeffs.items(), key=lambda kv: mono_key(kv[0]))

    def __eq__(self, other):
        return (isinstance(other, LocalSymbol) and self.n == other.n
                and self.m == other.m and self.point == other.point
                and self.coeffs == other.coeffs)

    def scale(self, c) -> "LocalSymbol":
        c = Fraction(c)
        return LocalSymbol(self.n, self.m, self.point,
                           {b: c * v for b, v in self.coeffs.items()}, self.degree)

    def add(self, other: "LocalSymbol") -> "LocalSymbol":
        if self.point != other.point:
            raise ValueError("symbols at different points")
        out = dict(self.coeffs)
        for b, v in other.coeffs.items():
            s = out.get(b, Fraction(0)) + v
            if s:
                out[b] = s
            else:
                out.pop(b, None)
        return LocalSymbol(self.n, self.m, self.point, out,
                           max(self.degree, other.degree))


def _delta_coordinates(rep: GroupElement, texp: TruncatedGroupExp):
    """Per-coordinate displacement polynomials coord(t) - coord(0)."""
    n = texp.H.rows
    m = texp.Mu.rows
    Yt, Vt = moved_point(rep, texp)
    base = rep.act(Point.base(n, m))
    table = texp.H[0, 0].table
    deltas = []
    for (i, j) in sym_pairs(n):
        deltas.append(Yt[i - 1, j - 1]
                      - Polynomial.constant(table, base.Y[i - 1, j - 1]))
    for k in range(m):
        for l in range(n):
            deltas.append(Vt[k, l]
                          - Polynomial.constant(table, base.V[k, l]))
    return base, deltas


def _local_symbol(P: InvariantPolynomial, rep: GroupElement,
                  texp: TruncatedGroupExp) -> LocalSymbol:
    base, deltas = _delta_coordinates(rep, texp)
    table = texp.H[0, 0].table
    idx = tuple(range(table.width))
    d = texp.degree
    ncoords = len(deltas)
    pterms = P.body.terms

    gamma_fact = {}
    for gexps in pterms:
        f = 1
        for e in gexps:
            f *= factorial(e)
        gamma_fact[gexps] = f

    powers = {(0,) * ncoords: Polynomial.one(table)}
    coeffs = {}
    for beta in graded_exponents(ncoords, d):
        if sum(beta) == 0:
            prod = powers[beta]
        else:
            i = next(k for k, e in enumerate(beta) if e)
            parent = beta[:i] + (beta[i] - 1,) + beta[i + 1:]
            prod = (powers[parent] * deltas[i]).truncate(idx, d)
            powers[beta] = prod
        if prod.is_zero():
            continue
        total = Fraction(0)
        for gexps, pc in pterms.items():
            tc = prod.coefficient(gexps)
            if tc:
                total += pc * gamma_fact[gexps] * tc
        if total:
            bfact = 1
            for e in beta:
                bfact *= factorial(e)
            coeffs[beta] = total / bfact
    return LocalSymbol(P.n, P.m, base, coeffs, d)


def theta_local(P: InvariantPolynomial, rep: GroupElement, verify: bool = True,
                verify_samples: int = 5, seed=0) -> LocalSymbol:
    """The operator's coefficients at the point rep moves the base point to."""
    if rep.n != P.n or rep.m != P.m:
        raise ValueError("group element size does not match the polynomial")
    if verify:
        ok, msg = k_invariance_check(P, samples=verify_samples, seed=seed)
        if not ok:
            raise ValueError(
                f"polynomial is not K-invariant, so its operator is "
                f"ill-defined: {msg}")
    d = P.body.total_degree()
    ttable, xt, zt = canonical_linear_form(P.n, P.m)
    texp = exp_truncated(xt, zt, d)
    return _local_symbol(P, rep, texp)


def theta_closed(P: InvariantPolynomial, coeff_degree: int | None = None,
                 det_power: int = 0, samples: int | None = None,
                 holdout: int = 3, seed=0, verify: bool = True,
                 check_invariance: bool = True, invariance_elements: int = 5,
                 table: VariableTable | None = None) -> DiffOperator:
    """Closed form of the operator: exact interpolation of its local symbols.

    Coefficients are fitted as polynomials of total degree <= coeff_degree
    (default: the degree of P) in the coordinates, divided by
    det(Y)^det_power when that is positive.  Raises when the ansatz cannot
    fit (inconsistent system, naming the first failing derivative index) or
    when too few sample points were requested.
    """
    n, m = P.n, P.m
    if verify:
        ok, msg = k_invariance_check(P, samples=5, seed=seed)
        if not ok:
            raise ValueError(f"polynomial is not K-invariant: {msg}")
    if det_power < 0:
        raise ValueError("det_power must be nonnegative")
    d = P.body.total_degree()
    D = d if coeff_degree is None else coeff_degree
    if D < 0:
        raise ValueError("coeff_degree must be nonnegative")
    ctable = coordinate_table(n, m) if table is None else table
    ncoords = num_coords(n, m)
    monos = list(graded_exponents(ncoords, D))
    nmono = len(monos)
    nsamples = (nmono + holdout) if samples is None else samples
    if nsamples < nmono + holdout:
        raise UnderdeterminedSystemError(
            f"need at least {nmono + holdout} sample points for {nmono} "
            f"ansatz monomials plus {holdout} held out; increase samples")

    ttable, xt, zt = canonical_linear_form(n, m)
    texp = exp_truncated(xt, zt, d)

    points = []
    symbols = []
    seen = set()
    tick = 0

    def draw(count):
        nonlocal tick
        while count > 0:
            rep = sample_group_element(n, m, seed=f"{seed}:theta:{tick}")
            tick += 1
            base = rep.act(Point.base(n, m))
            key = tuple(base.coordinates().values())
            if key in seen:
                continue
            seen.add(key)
            points.append(key)
            symbols.append(_local_symbol(P, rep, texp))
            count -= 1

    draw(nsamples)

    betas = set()
    for sym in symbols:
        betas.update(sym.coeffs)
    betas = sorted(betas, key=mono_key)
    if not betas:
        return DiffOperator.zero(ctable)

    def mono_value(point_vals, exps):
        out = Fraction(1)
        for val, e in zip(point_vals, exps):
            if e:
                out *= val ** e
        return out

    def det_value(sym: LocalSymbol) -> Fraction:
        return sym.point.Y.det()

    # A degenerate draw can leave the fit system rank-deficient even though
    # the ansatz is fine; with automatic sizing, top the samples up instead
    # of failing.  An explicit ``samples`` keeps the strict behavior.
    grow_left = 6 if samples is None else 0
    while True:
        nfit = len(points) - holdout
        a_rows = [[mono_value(points[i], mu) for mu in monos]
                  for i in range(nfit)]
        rhs_rows = []
        for i in range(nfit):
            scale = (det_value(symbols[i]) ** det_power if det_power
                     else Fraction(1))
            rhs_rows.append([symbols[i].coeffs.get(b, Fraction(0)) * scale
                             for b in betas])
        try:
            solution = solve_exact(a_rows, rhs_rows)
            break
        except UnderdeterminedSystemError:
            if not grow_left:
                raise
            grow_left -= 1
            draw(max(2, nmono // 4))
        except InconsistentSystemError:
            for col, beta in enumerate(betas):
                single = [[row[col]] for row in rhs_rows]
                try:
                    solve_exact(a_rows, single)
                except InconsistentSystemError:
                    raise InconsistentSystemError(
                        f"no degree-{D} polynomial ansatz (det_power "
                        f"{det_power}) fits the coefficient of derivative "
                        f"index {beta}; raise coeff_degree or det_power"
                    ) from None
            raise

    dety_poly = _dety_polynomial(ctable, n)
    width = ctable.width
    terms = {}
    for col, beta in enumerate(betas):
        tdict = {}
        for a, mu in enumerate(monos):
            c = solution[col][a]
            if c:
                tdict[mu + (0,) * (width - ncoords)] = c
        if not tdict:
            continue
        num = Polynomial._make(ctable, tdict)
        if det_power:
            coeff = RationalFunction(num, dety_poly ** det_power)
        else:
            coeff = RationalFunction.from_poly(num)
        terms[beta] = coeff
    op = DiffOperator(ctable, terms)

    for i in range(nfit, len(points)):
        got = _evaluate_symbol(op, points[i], ctable)
        want = symbols[i].coeffs
        if got != want:
            raise InconsistentSystemError(
                f"held-out point {i} disagrees with the fitted operator; "
                f"the ansatz (degree {D}, det_power {det_power}) is too small")

    if check_invariance:
        for k in range(invariance_elements):
            el = sample_group_element(n, m, seed=f"{seed}:verify:{k}")
            rep = invariance_check(op, action_of(el, ctable))
            if not rep.ok:
                raise AssertionError(
                    f"fitted operator fails invariance for element {k}: {rep}")
    return op


def _dety_polynomial(table, n) -> Polynomial:
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b = min(i, j), max(i, j)
            row.append(Polynomial.variable(table, y_name(a, b)))
        rows.append(row)
    return Mat(n, n, rows).det(Polynomial.zero(table))


def _evaluate_symbol(op: DiffOperator, point_vals, table) -> dict:
    from .polynomials import PointEvaluator

    names = {}
    for idx, val in enumerate(point_vals):
        names[table.variables[idx].name] = val
    ev = PointEvaluator(table, names)
    out = {}
    for beta, coeff in op.terms.items():
        v = ev.rational(coeff)
        if v:
            out[beta] = v
    return out


@dataclass
class ConjectureCase:
    n: int
    i: int
    equal: bool
    difference: DiffOperator | None

    def __str__(self):
        verdict = "equal" if self.equal else f"DIFFERS by {self.difference}"
        return f"n={self.n}, i={self.i}: image vs trace power {verdict}"


def conjecture_check(n_max: int, seed=0, check_invariance: bool = True):
    """Compares the closed image of tr(X^i) with tr((2 Y dY)^i) for n <= n_max.

    Returns one ConjectureCase per (n, i).  Nothing is asserted here; callers
    decide which cases carry an expected answer.
    """
    from .constructors import build_operator
    from .grouplie import invariant_poly_build
    from .weyl import op_equal

    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    out = []
    for n in range(1, n_max + 1):
        ctable = coordinate_table(n, 0)
        for i in range(1, n + 1):
            P = invariant_poly_build("p", n, 0, (i,), verify=False)
            got = theta_closed(P, seed=f"{seed}:conj:{n}:{i}", verify=False,
                               check_invariance=check_invariance, table=ctable)
            want = build_operator(f"D:j={i}", n, 0, ctable)
            eq = op_equal(got, want)
            out.append(ConjectureCase(n, i, eq, None if eq else got - want))
    return out
