"""Plain-text grammar for superfunctions and superderivations.

Example:  (3/2)z^-2*eta1*eta3*eta4*d(theta1) + z^4*theta1*eta1*d(z)

Whitespace is ignored.  Rational literals are `p` or `p/q`; `z^k` takes any
integer exponent; `d(z)` is the base direction and `d(<name>)` an odd
direction; parentheses group subexpressions, `*` between factors is
optional.  A direction factor must close its product: `f*d(z)` is a
derivation term, `d(z)*f` is rejected.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .derivations import BASE, SuperDerivation, term_degree
from .grassmann import SuperFunction
from .laurent import LaurentPoly


class ExprError(ValueError):
    """Raised with a position-annotated message on bad input."""


_TOKEN = re.compile(
    r"""
    (?P<num>\d+(?:\s*/\s*\d+)?)
  | (?P<dir>d\(\s*[A-Za-z_][A-Za-z0-9_]*\s*\))
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[\^+\-*()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ExprError(f"unexpected character {text[pos]!r} at position {pos}")
        tokens.append((m.lastgroup, m.group().replace(" ", ""), pos))
        pos = m.end()
    return tokens


class _Parser:
    """Values are either SuperFunction or SuperDerivation instances."""

    def __init__(self, text, names, base_var):
        self.tokens = _tokenize(text)
        self.i = 0
        self.names = names
        self.base_var = base_var

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, None)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self):
        value = self.parse_sum()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ExprError(f"unexpected {val!r} at position {pos}")
        return value

    def parse_sum(self):
        sign = 1
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        total = self.parse_product()
        if sign == -1:
            total = -total
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                term = self.parse_product()
                term = -term if val == "-" else term
                total = _add(total, term, pos)
                continue
            return total

    def parse_product(self):
        value = self.parse_atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                kind, val, pos = self.peek()
            if kind in ("num", "name", "dir") or (kind == "op" and val == "("):
                value = _mul(value, self.parse_atom(), pos)
                continue
            return value

    def parse_atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return SuperFunction({0: LaurentPoly({0: Fraction(val)})})
        if kind == "dir":
            name = val[2:-1]
            if name == self.base_var:
                direction = BASE
            elif name in self.names:
                direction = self.names[name]
            else:
                raise ExprError(f"unknown direction {name!r} at position {pos}")
            return SuperDerivation({(0, direction): LaurentPoly.one()})
        if kind == "name":
            if val == self.base_var:
                exp = 1
                k2, v2, _ = self.peek()
                if k2 == "op" and v2 == "^":
                    self.take()
                    exp = self._expect_int()
                return SuperFunction({0: LaurentPoly.monomial(exp)})
            if val in self.names:
                return SuperFunction.generator(self.names[val])
            raise ExprError(f"unknown generator {val!r} at position {pos}")
        if kind == "op" and val == "(":
            inner = self.parse_sum()
            k2, v2, p2 = self.take()
            if not (k2 == "op" and v2 == ")"):
                raise ExprError(f"expected ')' at position {p2}")
            return inner
        raise ExprError(f"unexpected {val!r} at position {pos}")

    def _expect_int(self):
        sign = 1
        kind, val, pos = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
            kind, val, pos = self.peek()
        if kind != "num" or "/" in val:
            raise ExprError(f"expected integer exponent at position {pos}")
        self.take()
        return sign * int(val)


def _add(a, b, pos):
    if isinstance(a, SuperFunction) and isinstance(b, SuperFunction):
        return a + b
    if isinstance(a, SuperDerivation) and isinstance(b, SuperDerivation):
        return a + b
    raise ExprError(f"cannot add a function and a derivation (position {pos})")


def _mul(a, b, pos):
    if isinstance(a, SuperDerivation):
        raise ExprError(
            f"a direction factor must close its product (position {pos})"
        )
    if isinstance(b, SuperFunction):
        return a * b
    # function times derivation: multiply into each coefficient from the left
    terms = {}
    for mf, pf in a.terms.items():
        fun = SuperFunction({mf: pf})
        for (m, d), p in b.terms.items():
            prod = fun * SuperFunction({m: p})
            for mask, poly in prod.terms.items():
                key = (mask, d)
                s = terms.get(key)
                poly = poly if s is None else s + poly
                if poly:
                    terms[key] = poly
                else:
                    del terms[key]
    return SuperDerivation(terms)


def _name_table(names):
    return {name: i for i, name in enumerate(names)}


def parse_derivation(text, names, base_var="z"):
    value = _Parser(text, _name_table(names), base_var).parse()
    if isinstance(value, SuperFunction):
        if not value:
            return SuperDerivation.zero()
        raise ExprError("expression has no direction factor d(...)")
    return value


def parse_function(text, names, base_var="z"):
    value = _Parser(text, _name_table(names), base_var).parse()
    if isinstance(value, SuperDerivation):
        if not value:
            return SuperFunction.zero()
        raise ExprError("function expression cannot contain d(...)")
    return value


def _format_monomial(coeff, exp, mask, names, base_var):
    factors = []
    if exp:
        factors.append(base_var if exp == 1 else f"{base_var}^{exp}")
    for i in range(mask.bit_length()):
        if mask >> i & 1:
            factors.append(names[i])
    body = "*".join(factors)
    if coeff == 1:
        return body if body else "1"
    if coeff == -1:
        return f"-{body}" if body else "-1"
    c = str(coeff) if coeff.denominator == 1 and coeff > 0 else f"({coeff})"
    return f"{c}*{body}" if body else c


def format_function(f, names, base_var="z"):
    if not f:
        return "0"
    parts = []
    for mask in sorted(f.terms):
        poly = f.terms[mask]
        for exp in sorted(poly.coeffs):
            parts.append(_format_monomial(poly.coeffs[exp], exp, mask, names, base_var))
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def format_derivation(d, names, base_var="z"):
    if not d:
        return "0"
    parts = []
    for mask, direction in sorted(d.terms, key=lambda k: (k[0], k[1])):
        poly = d.terms[(mask, direction)]
        dname = base_var if direction == BASE else names[direction]
        for exp in sorted(poly.coeffs):
            mono = _format_monomial(poly.coeffs[exp], exp, mask, names, base_var)
            if mono == "1":
                parts.append(f"d({dname})")
            elif mono == "-1":
                parts.append(f"-d({dname})")
            else:
                parts.append(f"{mono}*d({dname})")
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def format_slot(mask, direction, names, base_var="z"):
    """Monomial shape of a slot, e.g. 'eta1*eta3*eta4*d(theta1)'."""
    gens = [names[i] for i in range(mask.bit_length()) if mask >> i & 1]
    dname = base_var if direction == BASE else names[direction]
    head = "*".join(gens)
    return (head + "*" if head else "") + f"d({dname})"


def slot_degree(mask, direction):
    return term_degree(mask, direction)
