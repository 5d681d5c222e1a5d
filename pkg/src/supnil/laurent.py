"""Sparse Laurent polynomials in one variable with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class LaurentPoly:
    """Laurent polynomial stored as {exponent: coefficient} with Fraction entries.

    Instances are treated as immutable: every operation returns a fresh
    object and zero coefficients are never stored.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        data = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else coeffs
            for e, c in items:
                c = Fraction(c)
                if c:
                    prev = data.get(e)
                    c = c if prev is None else prev + c
                    if c:
                        data[e] = c
                    else:
                        del data[e]
        self.coeffs = data

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: 1})

    @classmethod
    def monomial(cls, exponent, coefficient=1):
        return cls({exponent: coefficient})

    @classmethod
    def _raw(cls, data):
        # trusted constructor: data already trimmed of zeros
        p = cls.__new__(cls)
        p.coeffs = data
        return p

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, LaurentPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly({0: other})
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        data = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = data.get(e, 0) + c
            if s:
                data[e] = s
            else:
                data.pop(e, None)
        return LaurentPoly._raw(data)

    def __neg__(self):
        return LaurentPoly._raw({e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return LaurentPoly()
            return LaurentPoly._raw({e: c * other for e, c in self.coeffs.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        data = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                s = data.get(e, 0) + c1 * c2
                if s:
                    data[e] = s
                else:
                    data.pop(e, None)
        return LaurentPoly._raw(data)

    __rmul__ = __mul__

    def derivative(self):
        """d/dz, exactly."""
        return LaurentPoly._raw(
            {e - 1: c * e for e, c in self.coeffs.items() if e != 0}
        )

    def shift(self, k):
        """Multiply by z^k."""
        if k == 0:
            return self
        return LaurentPoly._raw({e + k: c for e, c in self.coeffs.items()})

    def reciprocal_substitution(self):
        """Substitute z -> 1/z (negate all exponents)."""
        return LaurentPoly._raw({-e: c for e, c in self.coeffs.items()})

    def restrict(self, lo=None, hi=None):
        """Keep only exponents e with lo <= e <= hi (None = unbounded)."""
        data = {
            e: c
            for e, c in self.coeffs.items()
            if (lo is None or e >= lo) and (hi is None or e <= hi)
        }
        return LaurentPoly._raw(data)

    def min_exp(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no minimal exponent")
        return min(self.coeffs)

    def max_exp(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no maximal exponent")
        return max(self.coeffs)

    def is_polynomial(self):
        return all(e >= 0 for e in self.coeffs)

    def content_normalized(self):
        """Divide by the rational content; leading (highest) coefficient positive.

        Returns (normalized, content) with self == content * normalized.
        """
        if not self.coeffs:
            return self, Fraction(0)
        num = 0
        den = 1
        for c in self.coeffs.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        content = Fraction(num, den)
        if self.coeffs[self.max_exp()] < 0:
            content = -content
        return LaurentPoly._raw({e: c / content for e, c in self.coeffs.items()}), content

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs):
            c = self.coeffs[e]
            if e == 0:
                parts.append(str(c))
            else:
                var = "z" if e == 1 else f"z^{e}"
                if c == 1:
                    parts.append(var)
                elif c == -1:
                    parts.append(f"-{var}")
                else:
                    parts.append(f"{c}*{var}")
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    __repr__ = __str__
