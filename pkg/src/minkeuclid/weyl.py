"""Differential operators with exact rational-function coefficients.

An operator is stored in normal order: a finite sum of terms
``coefficient * d^alpha`` with the coefficient (a RationalFunction in the
coordinates and formal parameters) on the left and the derivative monomial
``d^alpha`` on the right.  ``alpha`` runs over the coordinate variables only.
The normal form is canonical, so structural equality decides operator
equality.

Composition uses the generalized Leibniz rule

    (a d^alpha)(b d^beta) = a * sum_{gamma <= alpha} C(alpha, gamma)
                            d^(alpha-gamma)(b) d^(gamma+beta).

Invariance of an operator D under a coordinate substitution phi (an affine
group action on the coordinates) means D(f o phi) = (Df) o phi for all
polynomials f.  Two equivalent test routes are provided: exact conjugation of
D by the substitution (valid for affine actions, complete at every degree)
and the literal monomial sweep up to a test degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .polynomials import (
    ROLE_COORD_V,
    ROLE_COORD_Y,
    EvaluationError,
    Polynomial,
    RationalFunction,
    SubstitutionCache,
    TableMismatchError,
    VariableTable,
    graded_exponents,
    mono_key,
)


def _coord_count(table: VariableTable) -> int:
    idx = table.role_indices(ROLE_COORD_Y, ROLE_COORD_V)
    if idx != tuple(range(len(idx))):
        raise ValueError("coordinate variables must form a prefix of the table")
    return len(idx)


def _coerce_rf(table, value) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.table != table:
            raise TableMismatchError("coefficient table mismatch")
        return value
    if isinstance(value, Polynomial):
        if value.table != table:
            raise TableMismatchError("coefficient table mismatch")
        return RationalFunction.from_poly(value)
    return RationalFunction.constant(table, value)


class DiffOperator:
    """Normally ordered differential operator over a coordinate table."""

    __slots__ = ("table", "ncoords", "terms")

    def __init__(self, table: VariableTable, terms: dict):
        nc = _coord_count(table)
        clean = {}
        for alpha, coeff in terms.items():
            alpha = tuple(alpha)
            if len(alpha) != nc or any(a < 0 for a in alpha):
                raise ValueError(f"bad derivative multi-index {alpha}")
            rf = _coerce_rf(table, coeff)
            if rf.is_zero():
                continue
            clean[alpha] = rf
        self.table = table
        self.ncoords = nc
        self.terms = clean

    @classmethod
    def _make(cls, table, ncoords, terms):
        op = object.__new__(cls)
        op.table = table
        op.ncoords = ncoords
        op.terms = terms
        return op

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, table):
        return cls._make(table, _coord_count(table), {})

    @classmethod
    def identity(cls, table):
        nc = _coord_count(table)
        return cls._make(table, nc, {(0,) * nc: RationalFunction.constant(table, 1)})

    @classmethod
    def mult(cls, value):
        """Multiplication operator by a polynomial or rational function."""
        table = value.table
        nc = _coord_count(table)
        rf = _coerce_rf(table, value)
        if rf.is_zero():
            return cls.zero(table)
        return cls._make(table, nc, {(0,) * nc: rf})

    @classmethod
    def partial(cls, table, orders: dict, coeff=1):
        """d^alpha with the given orders (by variable name), times a coefficient."""
        nc = _coord_count(table)
        alpha = [0] * nc
        for nm, k in orders.items():
            i = table.index(nm)
            if i >= nc:
                raise ValueError(f"{nm!r} is not a coordinate variable")
            alpha[i] = int(k)
        rf = _coerce_rf(table, coeff)
        if rf.is_zero():
            return cls.zero(table)
        return cls._make(table, nc, {tuple(alpha): rf})

    # -- basic structure -----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def order(self) -> int:
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def coefficient(self, alpha) -> RationalFunction:
        return self.terms.get(tuple(alpha), RationalFunction.constant(self.table, 0))

    def term_count(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        return hash((self.table, frozenset((a, c) for a, c in self.terms.items())))

    # -- linear structure ----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            rf = _coerce_rf(self.table, other)
            other = DiffOperator._make(
                self.table, self.ncoords,
                {} if rf.is_zero() else {(0,) * self.ncoords: rf})
        if not isinstance(other, DiffOperator):
            return NotImplemented
        if self.table != other.table:
            raise TableMismatchError("operators over different tables")
        out = dict(self.terms)
        for a, c in other.terms.items():
            s = out.get(a)
            if s is None:
                out[a] = c
            else:
                s = s + c
                if s.is_zero():
                    del out[a]
                else:
                    out[a] = s
        return DiffOperator._make(self.table, self.ncoords, out)

    __radd__ = __add__

    def __neg__(self):
        return DiffOperator._make(self.table, self.ncoords,
                                  {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, DiffOperator):
            return self + (-other)
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return self + (-_coerce_rf(self.table, other))
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, value):
        """Left multiplication by a function or constant (coefficient scaling)."""
        rf = _coerce_rf(self.table, value)
        if rf.is_zero():
            return DiffOperator.zero(self.table)
        return DiffOperator._make(self.table, self.ncoords,
                                  {a: rf * c for a, c in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        """Operator product: composition (self applied after other)."""
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, (Polynomial, RationalFunction)):
            other = DiffOperator.mult(_coerce_rf(self.table, other))
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return op_compose(self, other)

    # -- action on functions ---------------------------------------------------

    def apply(self, f) -> RationalFunction:
        f = _coerce_rf(self.table, f)
        total = RationalFunction.constant(self.table, 0)
        for alpha, a in self.terms.items():
            g = f
            for i, e in enumerate(alpha):
                for _ in range(e):
                    g = g.diff(i)
                    if g.is_zero():
                        break
                if g.is_zero():
                    break
            if g.is_zero():
                continue
            total = total + a * g
        return total

    # -- display ----------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.table.names
        parts = []
        for alpha, c in self.sorted_terms():
            ds = [f"d{names[i]}" + (f"^{e}" if e > 1 else "")
                  for i, e in enumerate(alpha) if e]
            cs = str(c)
            if "+" in cs or "-" in cs[1:] or "/" in cs:
                cs = f"({cs})"
            parts.append(" ".join(([cs] if cs != "1" or not ds else []) + ds))
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOperator({self})"


def op_apply(op: DiffOperator, f) -> RationalFunction:
    return op.apply(f)


def _derivatives_upto(b: RationalFunction, alpha):
    """All nonzero derivatives d^delta(b) for delta <= alpha, as a dict."""
    zero_key = (0,) * len(alpha)
    res = {zero_key: b}
    for i, ai in enumerate(alpha):
        if not ai:
            continue
        extended = dict(res)
        for delta, f in res.items():
            cur = f
            for k in range(1, ai + 1):
                cur = cur.diff(i)
                if cur.is_zero():
                    break
                extended[delta[:i] + (k,) + delta[i + 1:]] = cur
        res = extended
    return res


def _multi_binom(alpha, delta) -> int:
    out = 1
    for a, d in zip(alpha, delta):
        if d:
            out *= math.comb(a, d)
    return out


def op_compose(left: DiffOperator, right: DiffOperator) -> DiffOperator:
    """Normal-ordered composition left o right (right acts first)."""
    if left.table != right.table:
        raise TableMismatchError("operators over different tables")
    table = left.table
    out = {}
    for alpha, a in left.terms.items():
        for beta, b in right.terms.items():
            derivs = _derivatives_upto(b, alpha)
            for delta, db in derivs.items():
                # delta = alpha - gamma is the part of alpha spent on b
                gamma = tuple(x - d for x, d in zip(alpha, delta))
                coeff = a * db
                cb = _multi_binom(alpha, delta)
                if cb != 1:
                    coeff = coeff * cb
                key = tuple(g + bb for g, bb in zip(gamma, beta))
                s = out.get(key)
                if s is None:
                    out[key] = coeff
                else:
                    s = s + coeff
                    if s.is_zero():
                        del out[key]
                    else:
                        out[key] = s
    return DiffOperator._make(table, left.ncoords, out)


def op_commutator(a: DiffOperator, b: DiffOperator) -> DiffOperator:
    return op_compose(a, b) - op_compose(b, a)


def op_equal(a: DiffOperator, b: DiffOperator) -> bool:
    return a == b


# -- group actions on coordinates ------------------------------------------------


class ActionMap:
    """Affine coordinate substitution with its inverse and Jacobian.

    ``bindings[i]`` is the polynomial image of the i-th coordinate under the
    pullback substitution; ``inverse_bindings`` is the substitution of the
    inverse group element.
    """

    __slots__ = ("table", "ncoords", "bindings", "inverse_bindings")

    def __init__(self, table: VariableTable, bindings, inverse_bindings):
        nc = _coord_count(table)
        bindings = tuple(bindings)
        inverse_bindings = tuple(inverse_bindings)
        if len(bindings) != nc or len(inverse_bindings) != nc:
            raise ValueError("need one binding per coordinate")
        for p in bindings + inverse_bindings:
            if not isinstance(p, Polynomial) or p.table != table:
                raise TableMismatchError("bindings must be polynomials over the same table")
        self.table = table
        self.ncoords = nc
        self.bindings = bindings
        self.inverse_bindings = inverse_bindings

    def is_affine(self) -> bool:
        coords = range(self.ncoords)
        for p in self.bindings + self.inverse_bindings:
            if p.total_degree_in(coords) > 1:
                return False
        return True

    def jacobian(self):
        """Constant matrix J with J[j][i] = d(binding_j)/d(coord_i)."""
        nc = self.ncoords
        J = []
        for j in range(nc):
            row = [Fraction(0)] * nc
            for exps, c in self.bindings[j].terms.items():
                nz = [i for i, e in enumerate(exps) if e]
                if not nz:
                    continue
                if len(nz) > 1 or exps[nz[0]] > 1 or nz[0] >= nc:
                    raise ValueError("action is not affine in the coordinates")
                row[nz[0]] = c
            J.append(row)
        return J

    def binding_map(self, inverse=False):
        src = self.inverse_bindings if inverse else self.bindings
        return {self.table.names[i]: src[i] for i in range(self.ncoords)}

    def pullback_cache(self, inverse=False) -> SubstitutionCache:
        return SubstitutionCache(self.table, self.binding_map(inverse))

    def roundtrip_ok(self) -> bool:
        """Checks that the two substitutions really are mutually inverse."""
        cache = self.pullback_cache()
        for i in range(self.ncoords):
            img = cache.subst(self.inverse_bindings[i])
            if img != Polynomial.variable(self.table, self.table.names[i]):
                return False
        return True


def conjugate_operator(op: DiffOperator, action: ActionMap) -> DiffOperator:
    """The operator S_phi^{-1} o D o S_phi where (S_phi f) = f o phi.

    For an affine action this is again a differential operator:
    multiplication parts pull back through the inverse substitution and each
    d_i becomes the constant linear combination given by the Jacobian.  D is
    invariant under phi exactly when the conjugate equals D.
    """
    table = op.table
    nc = op.ncoords
    J = action.jacobian()
    inv_cache = action.pullback_cache(inverse=True)
    names = table.names
    # linear forms replacing each derivative symbol; reuse coordinate variables
    # as commuting placeholders for the derivative monomial expansion
    eta_images = {}
    for i in range(nc):
        form = Polynomial.zero(table)
        for j in range(nc):
            if J[j][i]:
                form = form + Polynomial.variable(table, names[j]) * J[j][i]
        eta_images[names[i]] = form
    eta_cache = SubstitutionCache(table, eta_images)
    width = table.width
    out = {}
    for alpha, a in op.terms.items():
        num = inv_cache.subst(a.num)
        if a.den.is_one():
            a2 = RationalFunction.from_poly(num)
        else:
            den = inv_cache.subst(a.den)
            a2 = RationalFunction(num, den)
        expansion = eta_cache.monomial(alpha + (0,) * (width - nc))
        for exps, c in expansion.terms.items():
            beta = exps[:nc]
            coeff = a2 * c
            s = out.get(beta)
            if s is None:
                out[beta] = coeff
            else:
                s = s + coeff
                if s.is_zero():
                    del out[beta]
                else:
                    out[beta] = s
    return DiffOperator._make(table, nc, out)


@dataclass
class InvarianceReport:
    ok: bool
    method: str
    test_degree: int
    failing_monomial: tuple | None = None
    note: str | None = None
    failing_name: str | None = None

    def __str__(self):
        if self.ok:
            extra = f" ({self.note})" if self.note else ""
            return f"invariant up to degree {self.test_degree} [{self.method}]{extra}"
        shown = self.failing_name or self.failing_monomial
        return f"NOT invariant: first failing monomial {shown} [{self.method}]"


def _monomial_name(table, exps) -> str:
    parts = []
    for idx, e in enumerate(exps):
        if e == 1:
            parts.append(table.variables[idx].name)
        elif e > 1:
            parts.append(f"{table.variables[idx].name}^{e}")
    return "*".join(parts) if parts else "1"


def _coordinate_monomials(table, nc, max_degree):
    width = table.width
    for exps in graded_exponents(nc, max_degree):
        yield exps + (0,) * (width - nc)


def invariance_check(op: DiffOperator, action: ActionMap, test_degree=None,
                     method: str = "auto") -> InvarianceReport:
    """Tests D(f o phi) = (Df) o phi for every coordinate monomial f with
    total degree <= test_degree (default: operator order + 2)."""
    if op.table != action.table:
        raise TableMismatchError("operator and action tables differ")
    if test_degree is None:
        test_degree = max(op.order(), 0) + 2
    if method == "auto":
        method = "conjugate" if action.is_affine() else "sweep"
    if method == "conjugate":
        diff = conjugate_operator(op, action) - op
        if diff.is_zero():
            return InvarianceReport(True, "conjugate", test_degree,
                                    note="exact at every degree")
        fail = _first_failing(diff, test_degree)
        if fail is None:
            return InvarianceReport(
                True, "conjugate", test_degree,
                note="difference is nonzero but only above the test degree")
        return InvarianceReport(False, "conjugate", test_degree, failing_monomial=fail,
                                failing_name=_monomial_name(op.table, fail))
    if method == "sweep":
        return _sweep_check(op, action, test_degree)
    raise ValueError(f"unknown invariance method {method!r}")


def _first_failing(diff_op: DiffOperator, test_degree: int):
    table = diff_op.table
    for exps in _coordinate_monomials(table, diff_op.ncoords, test_degree):
        f = Polynomial._make(table, {exps: Fraction(1)})
        if not diff_op.apply(f).is_zero():
            return exps[:diff_op.ncoords]
    return None


def _sweep_check(op: DiffOperator, action: ActionMap, test_degree: int) -> InvarianceReport:
    table = op.table
    fwd = action.pullback_cache()
    for exps in _coordinate_monomials(table, op.ncoords, test_degree):
        f = Polynomial._make(table, {exps: Fraction(1)})
        lhs = op.apply(fwd.subst(f))
        df = op.apply(f)
        num = fwd.subst(df.num)
        if df.den.is_one():
            rhs = RationalFunction.from_poly(num)
        else:
            rhs = RationalFunction(num, fwd.subst(df.den))
        if lhs != rhs:
            fail = exps[:op.ncoords]
            return InvarianceReport(False, "sweep", test_degree,
                                    failing_monomial=fail,
                                    failing_name=_monomial_name(op.table, fail))
    return InvarianceReport(True, "sweep", test_degree)
