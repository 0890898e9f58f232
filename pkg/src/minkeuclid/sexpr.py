"""Exact plain-text serialization, LaTeX rendering, and polynomial text input.

The s-expression format is whitespace-insensitive, carries the variable table
inline, writes every rational as a p/q atom, and round-trips bit-exactly:

    (polynomial (table (y_1_1 coord-y) (A formal-parameter))
                (3/2 (2 0)) (-1 (0 1)))
    (rational (table ...) (num ...terms...) (den ...terms...))
    (operator (table ...) (term (1 0) (num ...) (den ...)) ...)
"""

from __future__ import annotations

from fractions import Fraction

from .polynomials import (
    Polynomial,
    RationalFunction,
    Variable,
    VariableTable,
    mono_key,
)
from .weyl import DiffOperator


class SexprError(ValueError):
    """Malformed serialized input."""


# -- writer -------------------------------------------------------------------------


def _table_form(table: VariableTable) -> str:
    cols = " ".join(f"({v.name} {v.role})" for v in table.variables)
    return f"(table {cols})"


def _term_forms(p: Polynomial):
    out = []
    for exps, c in sorted(p.terms.items(), key=lambda t: mono_key(t[0]), reverse=True):
        es = " ".join(str(e) for e in exps)
        out.append(f"({c} ({es}))")
    return out


def dump_sexpr(obj) -> str:
    """Serialize a Polynomial, RationalFunction, or DiffOperator."""
    if isinstance(obj, Polynomial):
        parts = [f"(polynomial {_table_form(obj.table)}"]
        parts += [f"  {t}" for t in _term_forms(obj)]
        return "\n".join(parts) + ")"
    if isinstance(obj, RationalFunction):
        num = " ".join(_term_forms(obj.num))
        den = " ".join(_term_forms(obj.den))
        return (f"(rational {_table_form(obj.table)}\n"
                f"  (num {num})\n  (den {den}))")
    if isinstance(obj, DiffOperator):
        parts = [f"(operator {_table_form(obj.table)}"]
        for alpha, rf in sorted(obj.terms.items(),
                                key=lambda t: mono_key(t[0]), reverse=True):
            als = " ".join(str(a) for a in alpha)
            num = " ".join(_term_forms(rf.num))
            den = " ".join(_term_forms(rf.den))
            parts.append(f"  (term ({als}) (num {num}) (den {den}))")
        return "\n".join(parts) + ")"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- reader -------------------------------------------------------------------------


def _tokenize(text: str):
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "()":
            out.append(ch)
            i += 1
        elif ch.isspace():
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def _parse_forms(tokens):
    pos = 0

    def walk():
        nonlocal pos
        if pos >= len(tokens):
            raise SexprError("unexpected end of input")
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(walk())
            if pos >= len(tokens):
                raise SexprError("unbalanced parenthesis")
            pos += 1
            return items
        if tok == ")":
            raise SexprError("unbalanced parenthesis")
        return tok

    form = walk()
    if pos != len(tokens):
        raise SexprError("trailing input after the first form")
    return form


def _load_table(form) -> VariableTable:
    if not isinstance(form, list) or not form or form[0] != "table":
        raise SexprError("expected a (table ...) form")
    variables = []
    for item in form[1:]:
        if not isinstance(item, list) or len(item) != 2:
            raise SexprError(f"bad table column {item!r}")
        variables.append(Variable(item[0], item[1]))
    return VariableTable(variables)


def _load_terms(forms, table) -> dict:
    width = len(table)
    terms = {}
    for item in forms:
        if not isinstance(item, list) or len(item) != 2 or not isinstance(item[1], list):
            raise SexprError(f"bad term {item!r}")
        coeff = Fraction(item[0])
        exps = tuple(int(e) for e in item[1])
        if len(exps) != width:
            raise SexprError(f"term width {len(exps)} does not match table width {width}")
        if any(e < 0 for e in exps):
            raise SexprError("negative exponent")
        if coeff:
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
    return {e: c for e, c in terms.items() if c}


def _load_poly_parts(head, forms, table) -> Polynomial:
    if not isinstance(forms, list) or not forms or forms[0] != head:
        raise SexprError(f"expected a ({head} ...) block")
    return Polynomial._make(table, _load_terms(forms[1:], table))


def load_sexpr(text: str):
    """Parse a serialized Polynomial, RationalFunction, or DiffOperator."""
    form = _parse_forms(_tokenize(text))
    if not isinstance(form, list) or not form:
        raise SexprError("expected a parenthesized form")
    head = form[0]
    if head == "polynomial":
        if len(form) < 2:
            raise SexprError("polynomial needs a table")
        table = _load_table(form[1])
        return Polynomial._make(table, _load_terms(form[2:], table))
    if head == "rational":
        if len(form) != 4:
            raise SexprError("rational needs a table, a num block, and a den block")
        table = _load_table(form[1])
        num = _load_poly_parts("num", form[2], table)
        den = _load_poly_parts("den", form[3], table)
        return RationalFunction(num, den)
    if head == "operator":
        if len(form) < 2:
            raise SexprError("operator needs a table")
        table = _load_table(form[1])
        terms = {}
        for item in form[2:]:
            if (not isinstance(item, list) or len(item) != 4 or item[0] != "term"
                    or not isinstance(item[1], list)):
                raise SexprError(f"bad operator term {item!r}")
            alpha = tuple(int(a) for a in item[1])
            num = _load_poly_parts("num", item[2], table)
            den = _load_poly_parts("den", item[3], table)
            terms[alpha] = RationalFunction(num, den)
        return DiffOperator(table, terms)
    raise SexprError(f"unknown form head {head!r}")


# -- LaTeX rendering ----------------------------------------------------------------


_GREEK = {"pi": r"\pi"}


def _latex_name(name: str) -> str:
    if name in _GREEK:
        return _GREEK[name]
    parts = name.split("_")
    if len(parts) == 1:
        return name
    head, idx = parts[0], parts[1:]
    if all(len(i) == 1 for i in idx):
        return f"{head}_{{{''.join(idx)}}}"
    return f"{head}_{{{','.join(idx)}}}"


def _latex_coeff(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    sign = "-" if c < 0 else ""
    return f"{sign}\\tfrac{{{abs(c.numerator)}}}{{{c.denominator}}}"


def latex_polynomial(p: Polynomial) -> str:
    if p.is_zero():
        return "0"
    names = p.table.names
    parts = []
    for exps, c in p.sorted_terms():
        factors = []
        for i, e in enumerate(exps):
            if not e:
                continue
            nm = _latex_name(names[i])
            factors.append(nm if e == 1 else f"{nm}^{{{e}}}")
        body = r"\,".join(factors)
        if not factors:
            parts.append(_latex_coeff(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(_latex_coeff(c) + r"\," + body)
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


def latex_rational(rf: RationalFunction) -> str:
    if rf.den.is_one():
        return latex_polynomial(rf.num)
    return f"\\frac{{{latex_polynomial(rf.num)}}}{{{latex_polynomial(rf.den)}}}"


def _latex_derivative(table, alpha) -> str:
    total = sum(alpha)
    if total == 0:
        return ""
    names = table.names
    den = []
    for i, e in enumerate(alpha):
        if not e:
            continue
        nm = _latex_name(names[i])
        den.append(f"\\partial {nm}" if e == 1 else f"\\partial {nm}^{{{e}}}")
    top = r"\partial" if total == 1 else f"\\partial^{{{total}}}"
    bottom = r"\,".join(den)
    return f"\\frac{{{top}}}{{{bottom}}}"


def latex_operator(op: DiffOperator) -> str:
    """Display form with coefficients on the left and derivatives on the right."""
    if op.is_zero():
        return "0"
    parts = []
    ordered = sorted(op.terms.items(),
                     key=lambda t: (sum(t[0]), mono_key(t[0])), reverse=True)
    for alpha, rf in ordered:
        deriv = _latex_derivative(op.table, alpha)
        if rf.is_constant():
            c = rf.constant_value()
            if not deriv:
                parts.append(_latex_coeff(c))
            elif c == 1:
                parts.append(deriv)
            elif c == -1:
                parts.append("-" + deriv)
            else:
                parts.append(_latex_coeff(c) + r"\," + deriv)
            continue
        coeff = latex_rational(rf)
        if rf.den.is_one() and len(rf.num.terms) > 1:
            coeff = f"\\left({coeff}\\right)"
        parts.append(coeff + (r"\," + deriv if deriv else ""))
    out = " + ".join(parts)
    return out.replace("+ -", "- ")


# -- polynomial text input ------------------------------------------------------------


class PolyParseError(ValueError):
    """Malformed polynomial text."""


def _poly_tokens(text: str):
    out = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "+-*^()":
            out.append(ch)
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "/" and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            out.append(text[i:j])
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            out.append(text[i:j])
            i = j
        else:
            raise PolyParseError(f"unexpected character {ch!r} at position {i}")
    return out


def parse_poly_text(text: str, table: VariableTable) -> Polynomial:
    """Parse '3/2*x_1_1^2 - z_1_1*z_2_1 + 1' style input over the given table."""
    tokens = _poly_tokens(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        if pos >= len(tokens):
            raise PolyParseError("unexpected end of input")
        tok = tokens[pos]
        if expected is not None and tok != expected:
            raise PolyParseError(f"expected {expected!r}, found {tok!r}")
        pos += 1
        return tok

    def parse_sum():
        acc = parse_product()
        while peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
            acc = acc + parse_product() * sign
        return acc

    def parse_product():
        acc = parse_power()
        while peek() == "*":
            take()
            acc = acc * parse_power()
        return acc

    def parse_power():
        if peek() in ("+", "-"):
            sign = -1 if take() == "-" else 1
            return parse_power() * sign
        base = parse_atom()
        if peek() == "^":
            take()
            tok = take()
            if not tok.isdigit():
                raise PolyParseError(f"exponent must be a nonnegative integer, found {tok!r}")
            return base ** int(tok)
        return base

    def parse_atom():
        tok = peek()
        if tok == "(":
            take()
            inner = parse_sum()
            take(")")
            return inner
        tok = take()
        if tok and (tok[0].isdigit()):
            return Polynomial.constant(table, Fraction(tok))
        if tok in table:
            return Polynomial.variable(table, tok)
        raise PolyParseError(f"unknown variable {tok!r}")

    if not tokens:
        raise PolyParseError("empty input")
    result = parse_sum()
    if pos != len(tokens):
        raise PolyParseError(f"trailing input from token {tokens[pos]!r}")
    return result
