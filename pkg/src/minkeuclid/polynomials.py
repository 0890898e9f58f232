"""Exact sparse multivariate polynomials and rational functions over the rationals.

Variables live in an ordered ``VariableTable``; every polynomial stores one
exponent tuple per term, aligned with the table.  The monomial order used
throughout (leading terms, canonical forms, failure reports) is graded
lexicographic: higher total degree wins, ties broken left to right on the
exponent tuple.

Rational functions are kept in a canonical reduced form so that structural
equality coincides with mathematical equality: numerator and denominator share
no factor, and the denominator has coprime integer coefficients with a
positive leading coefficient.  Reduction is by multivariate gcd computed with
a fraction-free subresultant remainder sequence.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

ROLE_COORD_Y = "coord-y"
ROLE_COORD_V = "coord-v"
ROLE_ALGEBRA = "algebra-coordinate"
ROLE_EXP_PARAM = "exp-parameter"
ROLE_FORMAL = "formal-parameter"
ROLE_JET = "jet-symbol"

ROLES = (
    ROLE_COORD_Y,
    ROLE_COORD_V,
    ROLE_ALGEBRA,
    ROLE_EXP_PARAM,
    ROLE_FORMAL,
    ROLE_JET,
)


class TableMismatchError(ValueError):
    """Raised when two expressions over different variable tables are combined."""


class ExactDivisionError(ArithmeticError):
    """Raised when a division that must be exact leaves a remainder."""


class EvaluationError(ValueError):
    """Raised when evaluation hits a zero denominator; carries the point."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class Variable:
    name: str
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown variable role {self.role!r}")


class VariableTable:
    """Ordered, role-tagged variable list shared by a family of polynomials."""

    __slots__ = ("variables", "names", "_index", "width")

    def __init__(self, variables):
        vs = tuple(variables)
        names = tuple(v.name for v in vs)
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names in table")
        self.variables = vs
        self.names = names
        self._index = {nm: i for i, nm in enumerate(names)}
        self.width = len(vs)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in table") from None

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def role_indices(self, *roles: str) -> tuple:
        return tuple(i for i, v in enumerate(self.variables) if v.role in roles)

    def __eq__(self, other):
        return isinstance(other, VariableTable) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __len__(self):
        return self.width

    def __repr__(self):
        return "VariableTable(" + ", ".join(f"{v.name}:{v.role}" for v in self.variables) + ")"


def _same_table(a: VariableTable, b: VariableTable):
    if a is b or a == b:
        return
    raise TableMismatchError("expressions belong to different variable tables")


def sym_pairs(n: int):
    """Index pairs (i, j), 1-based, i <= j, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def y_name(i: int, j: int) -> str:
    return f"y_{i}_{j}"


def v_name(k: int, l: int) -> str:
    return f"v_{k}_{l}"


def x_name(i: int, j: int) -> str:
    return f"x_{i}_{j}"


def z_name(k: int, l: int) -> str:
    return f"z_{k}_{l}"


DEFAULT_PARAMS = ("A", "B", "pi")


def coordinate_table(n: int, m: int, params=DEFAULT_PARAMS) -> VariableTable:
    """Table of point coordinates: y_i_j (i <= j), then v_k_l, then formal parameters."""
    vs = [Variable(y_name(i, j), ROLE_COORD_Y) for (i, j) in sym_pairs(n)]
    vs += [Variable(v_name(k, l), ROLE_COORD_V) for k in range(1, m + 1) for l in range(1, n + 1)]
    vs += [Variable(p, ROLE_FORMAL) for p in params]
    return VariableTable(vs)


def algebra_table(n: int, m: int) -> VariableTable:
    """Table of tangent-space coordinates: x_i_j (i <= j), then z_k_l."""
    vs = [Variable(x_name(i, j), ROLE_ALGEBRA) for (i, j) in sym_pairs(n)]
    vs += [Variable(z_name(k, l), ROLE_ALGEBRA) for k in range(1, m + 1) for l in range(1, n + 1)]
    return VariableTable(vs)


def num_coords(n: int, m: int) -> int:
    return n * (n + 1) // 2 + m * n


def graded_exponents(nvars: int, max_total: int):
    """All exponent tuples with total degree <= max_total, ascending graded lex."""
    out = []
    for d in range(max_total + 1):
        out.extend(_exponents_of_degree(nvars, d))
    return out


def _exponents_of_degree(nvars: int, d: int):
    if nvars == 0:
        return [()] if d == 0 else []
    if nvars == 1:
        return [(d,)]
    res = []
    for first in range(d + 1):
        for rest in _exponents_of_degree(nvars - 1, d - first):
            res.append((first,) + rest)
    return res


def mono_key(exps):
    """Graded-lex sort key; max() of these picks the leading monomial."""
    return (sum(exps), exps)


class Polynomial:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VariableTable, terms: dict):
        clean = {}
        w = table.width
        for exps, c in terms.items():
            c = _as_fraction(c)
            if not c:
                continue
            exps = tuple(exps)
            if len(exps) != w or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent tuple {exps} for table width {w}")
            clean[exps] = c
        self.table = table
        self.terms = clean
        self._hash = None

    @classmethod
    def _make(cls, table, terms):
        # trusted constructor: terms already canonical (no zeros, valid tuples)
        p = object.__new__(cls)
        p.table = table
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, table):
        return cls._make(table, {})

    @classmethod
    def constant(cls, table, value):
        value = _as_fraction(value)
        if not value:
            return cls.zero(table)
        return cls._make(table, {(0,) * table.width: value})

    @classmethod
    def one(cls, table):
        return cls.constant(table, 1)

    @classmethod
    def variable(cls, table, name):
        i = table.index(name)
        exps = tuple(1 if k == i else 0 for k in range(table.width))
        return cls._make(table, {exps: Fraction(1)})

    @classmethod
    def monomial(cls, table, exps_by_name: dict, coeff=1):
        exps = [0] * table.width
        for nm, e in exps_by_name.items():
            exps[table.index(nm)] = int(e)
        return cls(table, {tuple(exps): _as_fraction(coeff)})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def is_one(self) -> bool:
        if len(self.terms) != 1:
            return False
        (exps, c), = self.terms.items()
        return not any(exps) and c == 1

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return next(iter(self.terms.values()))

    # -- structure ----------------------------------------------------------

    def items(self):
        return self.terms.items()

    def coefficient(self, exps) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, var) -> int:
        i = self.table.index(var) if isinstance(var, str) else var
        if not self.terms:
            return -1
        return max(e[i] for e in self.terms)

    def total_degree_in(self, indices) -> int:
        if not self.terms:
            return -1
        idx = tuple(indices)
        return max(sum(e[i] for i in idx) for e in self.terms)

    def used_indices(self):
        used = set()
        for exps in self.terms:
            for i, e in enumerate(exps):
                if e:
                    used.add(i)
        return used

    def leading(self):
        """(exponents, coefficient) of the graded-lex leading term."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms, key=mono_key)
        return exps, self.terms[exps]

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.table, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.table == other.table and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.table, frozenset(self.terms.items())))
        return self._hash

    # -- arithmetic ----------------------------------------------------------

    def __neg__(self):
        return Polynomial._make(self.table, {e: -c for e, c in self.terms.items()})

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.table, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        _same_table(self.table, other.table)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Polynomial._make(self.table, out)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Polynomial.constant(self.table, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _as_fraction(other)
            if not other:
                return Polynomial.zero(self.table)
            return Polynomial._make(self.table, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        _same_table(self.table, other.table)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(map(int.__add__, e1, e2))
                s = out.get(e)
                if s is None:
                    out[e] = c1 * c2
                else:
                    s = s + c1 * c2
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return Polynomial._make(self.table, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial; use RationalFunction")
        result = Polynomial.one(self.table)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / _as_fraction(other))
        if isinstance(other, Polynomial):
            return RationalFunction(self, other)
        return NotImplemented

    # -- calculus and substitution -------------------------------------------

    def diff(self, var):
        i = self.table.index(var) if isinstance(var, str) else var
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if not e:
                continue
            nexps = exps[:i] + (e - 1,) + exps[i + 1:]
            s = out.get(nexps)
            out[nexps] = c * e if s is None else s + c * e
        return Polynomial._make(self.table, {e: c for e, c in out.items() if c})

    def truncate(self, indices, max_total: int):
        """Drop terms whose total degree over the given variable indices exceeds the bound."""
        idx = tuple(indices)
        kept = {e: c for e, c in self.terms.items() if sum(e[i] for i in idx) <= max_total}
        return Polynomial._make(self.table, kept)

    def subst(self, bindings: dict):
        """Substitute polynomials/rationals for variables (by name).

        Unbound variables pass through.  If any binding is a RationalFunction
        with a nontrivial denominator the result is a RationalFunction,
        otherwise a Polynomial.
        """
        table = self.table
        rational = False
        normalized = {}
        for nm, val in bindings.items():
            i = table.index(nm)
            if isinstance(val, RationalFunction):
                _same_table(table, val.num.table)
                if val.den.is_one():
                    val = val.num
                else:
                    rational = True
            elif isinstance(val, Polynomial):
                _same_table(table, val.table)
            else:
                val = Polynomial.constant(table, _as_fraction(val))
            normalized[i] = val
        if rational:
            return RationalFunction.from_poly(self)._subst_indexed(
                {i: (v if isinstance(v, RationalFunction) else RationalFunction.from_poly(v))
                 for i, v in normalized.items()})
        return self._subst_indexed_poly(normalized)

    def _subst_indexed_poly(self, bindings: dict):
        table = self.table
        out = {}
        pow_cache = {}
        for exps, c in self.terms.items():
            factors = []
            res = list(exps)
            for i, e in enumerate(exps):
                if e and i in bindings:
                    res[i] = 0
                    key = (i, e)
                    p = pow_cache.get(key)
                    if p is None:
                        p = bindings[i] ** e
                        pow_cache[key] = p
                    factors.append(p)
            acc = Polynomial._make(table, {tuple(res): c})
            for f in factors:
                acc = acc * f
            for e, cc in acc.terms.items():
                s = out.get(e)
                if s is None:
                    out[e] = cc
                else:
                    s = s + cc
                    if s:
                        out[e] = s
                    else:
                        del out[e]
        return Polynomial._make(table, out)

    def eval_rational(self, values: dict) -> Fraction:
        """Evaluate at a rational point; every variable that occurs must be bound."""
        table = self.table
        vals = {}
        for nm, v in values.items():
            vals[table.index(nm)] = _as_fraction(v)
        total = Fraction(0)
        for exps, c in self.terms.items():
            f = c
            for i, e in enumerate(exps):
                if not e:
                    continue
                if i not in vals:
                    raise ValueError(f"variable {table.names[i]!r} unbound in evaluation")
                f = f * vals[i] ** e
            total += f
        return total

    # -- display ---------------------------------------------------------------

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        names = self.table.names
        parts = []
        for exps, c in self.sorted_terms():
            factors = [f"{names[i]}^{e}" if e > 1 else names[i]
                       for i, e in enumerate(exps) if e]
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            elif c == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append(str(c) + "*" + "*".join(factors))
        s = " + ".join(parts)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"Polynomial({self})"


# -- gcd machinery -------------------------------------------------------------


def _int_content(polys) -> int:
    g = 0
    for p in polys:
        for c in p.terms.values():
            g = math.gcd(g, abs(c.numerator))
            if g == 1:
                return 1
    return g


def _primitive_decomposition(p: Polynomial):
    """p = content * primitive with integer coprime coefficients, positive lead."""
    if p.is_zero():
        return Fraction(0), p
    denlcm = 1
    for c in p.terms.values():
        denlcm = denlcm * c.denominator // math.gcd(denlcm, c.denominator)
    numgcd = 0
    for c in p.terms.values():
        numgcd = math.gcd(numgcd, abs(c.numerator * (denlcm // c.denominator)))
    content = Fraction(numgcd, denlcm)
    _, lead = p.leading()
    if lead < 0:
        content = -content
    prim = Polynomial._make(p.table, {e: c / content for e, c in p.terms.items()})
    return content, prim


def _strip_common_monomial(a: Polynomial, b: Polynomial):
    """Common per-variable minimum exponents of a and b, as an exponent tuple."""
    w = a.table.width

    def min_exps(p):
        mins = None
        for exps in p.terms:
            if mins is None:
                mins = list(exps)
            else:
                mins = [min(x, y) for x, y in zip(mins, exps)]
            if not any(mins):
                break
        return mins or [0] * w

    ma, mb = min_exps(a), min_exps(b)
    return tuple(min(x, y) for x, y in zip(ma, mb))


def _shift_down(p: Polynomial, shift):
    if not any(shift):
        return p
    return Polynomial._make(
        p.table, {tuple(e - s for e, s in zip(exps, shift)): c for exps, c in p.terms.items()})


def poly_divexact(p: Polynomial, d: Polynomial) -> Polynomial:
    """Exact polynomial division; raises ExactDivisionError on remainder."""
    _same_table(p.table, d.table)
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if p.is_zero():
        return p
    if d.is_constant():
        c = d.constant_value()
        return Polynomial._make(p.table, {e: v / c for e, v in p.terms.items()})
    dl_exps, dl_coeff = d.leading()
    rem = dict(p.terms)
    out = {}
    while rem:
        exps = max(rem, key=mono_key)
        coeff = rem[exps]
        q = tuple(map(int.__sub__, exps, dl_exps))
        if any(e < 0 for e in q):
            raise ExactDivisionError("division is not exact")
        qc = coeff / dl_coeff
        out[q] = qc
        # rem -= qc * x^q * d
        for de, dc in d.terms.items():
            e = tuple(map(int.__add__, q, de))
            s = rem.get(e, Fraction(0)) - qc * dc
            if s:
                rem[e] = s
            else:
                rem.pop(e, None)
    return Polynomial._make(p.table, out)


def _as_univariate(p: Polynomial, v: int):
    """Coefficient list in variable v; entries are polynomials free of v."""
    coeffs = {}
    for exps, c in p.terms.items():
        d = exps[v]
        stripped = exps[:v] + (0,) + exps[v + 1:]
        bucket = coeffs.setdefault(d, {})
        bucket[stripped] = c
    deg = max(coeffs)
    return [Polynomial._make(p.table, coeffs.get(i, {})) for i in range(deg + 1)]


def _from_univariate(coeffs, v: int, table) -> Polynomial:
    out = {}
    for d, p in enumerate(coeffs):
        for exps, c in p.terms.items():
            e = exps[:v] + (d,) + exps[v + 1:]
            out[e] = out.get(e, Fraction(0)) + c
    return Polynomial._make(table, {e: c for e, c in out.items() if c})


def _trim(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _pseudo_rem(A, B):
    """Pseudo-remainder of coefficient lists A by B in the main variable."""
    dA, dB = len(A) - 1, len(B) - 1
    lb = B[-1]
    R = list(A)
    steps = dA - dB + 1
    while R and len(R) - 1 >= dB:
        dR = len(R) - 1
        lr = R[-1]
        new = [lb * r for r in R[:-1]]
        for i in range(dB):
            j = dR - dB + i
            new[j] = new[j] - lr * B[i]
        R = _trim(new)
        steps -= 1
    if steps > 0 and R:
        mult = lb ** steps
        R = [mult * r for r in R]
    return R


def _poly_list_content(polys):
    g = None
    for p in polys:
        if p.is_zero():
            continue
        g = p if g is None else _gcd_integer(g, p)
        if g.is_constant():
            break
    return g


def _gcd_integer(a: Polynomial, b: Polynomial) -> Polynomial:
    """gcd of integer-coefficient polynomials, primitive with positive lead."""
    table = a.table
    if a.is_zero():
        return _primitive_decomposition(b)[1]
    if b.is_zero():
        return _primitive_decomposition(a)[1]
    shift = _strip_common_monomial(a, b)
    if any(shift):
        a = _shift_down(a, shift)
        b = _shift_down(b, shift)
    if a.is_constant() or b.is_constant():
        g = math.gcd(_int_content([a]), _int_content([b]))
        base = Polynomial.constant(table, g)
    else:
        ua, ub = a.used_indices(), b.used_indices()
        common = ua & ub
        if not common:
            g = math.gcd(_int_content([a]), _int_content([b]))
            base = Polynomial.constant(table, g)
        else:
            if a.terms == b.terms:
                base = _primitive_decomposition(a)[1]
            else:
                v = min(common, key=lambda i: (min(a.degree_in(i), b.degree_in(i)), i))
                A, B = _as_univariate(a, v), _as_univariate(b, v)
                ca, cb = _poly_list_content(A), _poly_list_content(B)
                A = [poly_divexact(x, ca) for x in A]
                B = [poly_divexact(x, cb) for x in B]
                c = _gcd_integer(ca, cb)
                pp = _subresultant_gcd(A, B, v, table)
                base = c * pp
                base = _primitive_decomposition(base)[1]
    mono = Polynomial._make(table, {shift: Fraction(1)}) if any(shift) else None
    return base * mono if mono is not None else base


def _subresultant_gcd(A, B, v: int, table) -> Polynomial:
    """Primitive gcd (in main variable v) of primitive coefficient lists."""
    if len(A) - 1 < len(B) - 1:
        A, B = B, A
    one = Polynomial.one(table)
    g = h = one
    while True:
        dA, dB = len(A) - 1, len(B) - 1
        delta = dA - dB
        R = _pseudo_rem(A, B)
        if not R:
            break
        if len(R) - 1 == 0:
            # nonzero constant remainder: primitive parts are coprime
            return one
        A, B = B, [poly_divexact(r, g * h ** delta) for r in R]
        g = A[-1]
        if delta == 0:
            pass
        elif delta == 1:
            h = g
        else:
            h = poly_divexact(g ** delta, h ** (delta - 1))
    v_content = _poly_list_content(B)
    B = [poly_divexact(x, v_content) for x in B]
    return _from_univariate(B, v, table)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Multivariate gcd, primitive over the integers with positive leading coefficient."""
    _same_table(a.table, b.table)
    if a.is_zero() and b.is_zero():
        return Polynomial.zero(a.table)
    pa = _primitive_decomposition(a)[1] if not a.is_zero() else a
    pb = _primitive_decomposition(b)[1] if not b.is_zero() else b
    return _gcd_integer(pa, pb)


class RationalFunction:
    """Quotient of polynomials in canonical reduced form."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        _same_table(num.table, den.table)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        num, den = _rf_reduce(num, den)
        self.num = num
        self.den = den

    @classmethod
    def _make(cls, num, den):
        rf = object.__new__(cls)
        rf.num = num
        rf.den = den
        return rf

    @classmethod
    def from_poly(cls, p: Polynomial):
        return cls._make(p, Polynomial.one(p.table))

    @classmethod
    def constant(cls, table, value):
        return cls._make(Polynomial.constant(table, value), Polynomial.one(table))

    @classmethod
    def variable(cls, table, name):
        return cls._make(Polynomial.variable(table, name), Polynomial.one(table))

    @property
    def table(self):
        return self.num.table

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return bool(self.num)

    def is_polynomial(self):
        return self.den.is_one()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_one():
            raise ValueError("rational function has a nontrivial denominator")
        return self.num

    def is_constant(self):
        return self.num.is_constant() and self.den.is_one()

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.constant_value()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = RationalFunction.constant(self.table, other)
        elif isinstance(other, Polynomial):
            other = RationalFunction.from_poly(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __neg__(self):
        return RationalFunction._make(-self.num, self.den)

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            _same_table(self.table, other.table)
            return other
        if isinstance(other, Polynomial):
            _same_table(self.table, other.table)
            return RationalFunction.from_poly(other)
        if isinstance(other, (int, Fraction)):
            return RationalFunction.constant(self.table, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RationalFunction._make(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den.is_one() and o.den.is_one():
            return RationalFunction._make(self.num * o.num, self.den)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k == 0:
            return RationalFunction.constant(self.table, 1)
        if k < 0:
            if self.is_zero():
                raise ZeroDivisionError("negative power of zero")
            return RationalFunction(self.den, self.num) ** (-k)
        return RationalFunction._make(self.num ** k, self.den ** k) if self.den.is_one() \
            else RationalFunction(self.num ** k, self.den ** k)

    def diff(self, var):
        n, d = self.num, self.den
        if d.is_one():
            return RationalFunction._make(n.diff(var), d)
        return RationalFunction(n.diff(var) * d - n * d.diff(var), d * d)

    def subst(self, bindings: dict):
        table = self.table
        indexed = {}
        for nm, val in bindings.items():
            i = table.index(nm)
            if isinstance(val, RationalFunction):
                _same_table(table, val.table)
            elif isinstance(val, Polynomial):
                _same_table(table, val.table)
                val = RationalFunction.from_poly(val)
            else:
                val = RationalFunction.constant(table, _as_fraction(val))
            indexed[i] = val
        return self._subst_indexed(indexed)

    def _subst_indexed(self, bindings: dict):
        if all(v.is_polynomial() for v in bindings.values()) and self.den.is_one():
            p = self.num._subst_indexed_poly({i: v.num for i, v in bindings.items()})
            return RationalFunction._make(p, Polynomial.one(self.table))
        num = _poly_subst_rf(self.num, bindings)
        den = _poly_subst_rf(self.den, bindings)
        if den.is_zero():
            raise EvaluationError("substitution sends the denominator to zero")
        return num / den

    def eval_rational(self, values: dict) -> Fraction:
        d = self.den.eval_rational(values)
        if d == 0:
            raise EvaluationError(f"denominator vanishes at point {values!r}")
        return self.num.eval_rational(values) / d

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num}) / ({self.den})"

    def __repr__(self):
        return f"RationalFunction({self})"


def _poly_subst_rf(p: Polynomial, bindings: dict) -> RationalFunction:
    table = p.table
    out = RationalFunction.constant(table, 0)
    pow_cache = {}
    for exps, c in p.terms.items():
        res = list(exps)
        acc = None
        for i, e in enumerate(exps):
            if e and i in bindings:
                res[i] = 0
                key = (i, e)
                f = pow_cache.get(key)
                if f is None:
                    f = bindings[i] ** e
                    pow_cache[key] = f
                acc = f if acc is None else acc * f
        base = RationalFunction._make(
            Polynomial._make(table, {tuple(res): c}), Polynomial.one(table))
        out = out + (base if acc is None else base * acc)
    return out


def _rf_reduce(num: Polynomial, den: Polynomial):
    table = num.table
    if num.is_zero():
        return num, Polynomial.one(table)
    if den.is_constant():
        c = den.constant_value()
        if c != 1:
            num = num * (Fraction(1) / c)
        return num, Polynomial.one(table)
    g = poly_gcd(num, den)
    if not g.is_constant():
        num = poly_divexact(num, g)
        den = poly_divexact(den, g)
        if den.is_constant():
            c = den.constant_value()
            if c != 1:
                num = num * (Fraction(1) / c)
            return num, Polynomial.one(table)
    content, prim = _primitive_decomposition(den)
    if content != 1:
        num = num * (Fraction(1) / content)
        den = prim
    return num, den


class SubstitutionCache:
    """Memoized monomial images under a fixed polynomial substitution.

    Useful when many polynomials over the same table are pushed through the
    same substitution (group actions): each monomial's expansion is computed
    once, built up one variable at a time from smaller monomials.
    """

    def __init__(self, table: VariableTable, images: dict):
        self.table = table
        self.images = {}
        for nm, p in images.items():
            _same_table(table, p.table)
            self.images[table.index(nm)] = p
        self.cache = {(0,) * table.width: Polynomial.one(table)}

    def monomial(self, exps) -> Polynomial:
        exps = tuple(exps)
        got = self.cache.get(exps)
        if got is not None:
            return got
        i = next(k for k, e in enumerate(exps) if e)
        parent = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
        base = self.monomial(parent)
        img = self.images.get(i)
        if img is None:
            img = Polynomial.variable(self.table, self.table.names[i])
            self.images[i] = img
        result = base * img
        self.cache[exps] = result
        return result

    def subst(self, p: Polynomial) -> Polynomial:
        acc = {}
        for exps, c in p.terms.items():
            for e, cc in self.monomial(exps).terms.items():
                s = acc.get(e)
                val = c * cc
                if s is None:
                    acc[e] = val
                else:
                    s = s + val
                    if s:
                        acc[e] = s
                    else:
                        del acc[e]
        return Polynomial._make(p.table, acc)


class PointEvaluator:
    """Evaluates many monomials/polynomials at one rational point, caching powers."""

    def __init__(self, table: VariableTable, values: dict):
        self.table = table
        self.values = [None] * table.width
        for nm, v in values.items():
            self.values[table.index(nm)] = _as_fraction(v)
        self._powers = [{} for _ in range(table.width)]

    def monomial(self, exps) -> Fraction:
        f = Fraction(1)
        for i, e in enumerate(exps):
            if not e:
                continue
            v = self.values[i]
            if v is None:
                raise ValueError(f"variable {self.table.names[i]!r} unbound")
            cache = self._powers[i]
            p = cache.get(e)
            if p is None:
                p = v ** e
                cache[e] = p
            f *= p
        return f

    def poly(self, p: Polynomial) -> Fraction:
        total = Fraction(0)
        for exps, c in p.terms.items():
            total += c * self.monomial(exps)
        return total

    def rational(self, rf: RationalFunction) -> Fraction:
        d = self.poly(rf.den)
        if d == 0:
            raise EvaluationError("denominator vanishes at the evaluation point")
        return self.poly(rf.num) / d
