"""Anticommuting monomials as bitmasks and superfunctions on one chart.

Generator i corresponds to bit i; the canonical monomial order is ascending
bit index.  All signs in the package are derived from this one convention.
"""

from __future__ import annotations

from .laurent import LaurentPoly


def mask_mul(a, b):
    """Concatenate two canonical monomials.

    Returns (sign, mask) with xi^a * xi^b == sign * xi^(a|b), or (0, 0) if a
    generator repeats.
    """
    if a & b:
        return 0, 0
    sign = 0
    rest = a
    while rest:
        low = rest & -rest
        sign ^= (b & (low - 1)).bit_count() & 1
        rest ^= low
    return (-1 if sign else 1), a | b


def mask_derive(mask, j):
    """Left derivative d/d(xi_j) of the canonical monomial.

    Returns (sign, mask without j) or (0, 0) if xi_j is absent.
    """
    bit = 1 << j
    if not mask & bit:
        return 0, 0
    below = (mask & (bit - 1)).bit_count()
    return (-1 if below & 1 else 1), mask ^ bit


class SuperFunction:
    """Finite sum of (Laurent coefficient) * (odd monomial) terms."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for mask, poly in items:
                if not isinstance(poly, LaurentPoly):
                    poly = LaurentPoly({0: poly})
                if poly:
                    prev = data.get(mask)
                    poly = poly if prev is None else prev + poly
                    if poly:
                        data[mask] = poly
                    else:
                        del data[mask]
        self.terms = data

    @classmethod
    def _raw(cls, data):
        f = cls.__new__(cls)
        f.terms = data
        return f

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({0: LaurentPoly.one()})

    @classmethod
    def generator(cls, i):
        return cls({1 << i: LaurentPoly.one()})

    @classmethod
    def base_var(cls):
        return cls({0: LaurentPoly.monomial(1)})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, SuperFunction):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        data = dict(self.terms)
        for m, p in other.terms.items():
            s = data.get(m)
            s = p if s is None else s + p
            if s:
                data[m] = s
            else:
                data.pop(m, None)
        return SuperFunction._raw(data)

    def __neg__(self):
        return SuperFunction._raw({m: -p for m, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            if not other:
                return SuperFunction()
            return SuperFunction._raw({m: p * other for m, p in self.terms.items()})
        if not isinstance(other, SuperFunction):
            return SuperFunction._raw(
                {m: p * other for m, p in self.terms.items() if p * other}
            )
        data = {}
        for m1, p1 in self.terms.items():
            for m2, p2 in other.terms.items():
                sign, m = mask_mul(m1, m2)
                if not sign:
                    continue
                q = p1 * p2 if sign == 1 else -(p1 * p2)
                s = data.get(m)
                q = q if s is None else s + q
                if q:
                    data[m] = q
                else:
                    data.pop(m, None)
        return SuperFunction._raw(data)

    def derive_base(self):
        """d/dz applied coefficient-wise."""
        data = {}
        for m, p in self.terms.items():
            dp = p.derivative()
            if dp:
                data[m] = dp
        return SuperFunction._raw(data)

    def derive_odd(self, j):
        """Left derivative along generator j."""
        data = {}
        for m, p in self.terms.items():
            sign, m2 = mask_derive(m, j)
            if not sign:
                continue
            q = p if sign == 1 else -p
            s = data.get(m2)
            q = q if s is None else s + q
            if q:
                data[m2] = q
            else:
                data.pop(m2, None)
        return SuperFunction._raw(data)

    def degrees(self):
        return sorted({m.bit_count() for m in self.terms})

    def is_homogeneous(self):
        return len(self.degrees()) <= 1

    def parity(self):
        """0 or 1 for parity-homogeneous functions, None for mixed."""
        pars = {m.bit_count() & 1 for m in self.terms}
        if not pars:
            return 0
        if len(pars) > 1:
            return None
        return pars.pop()

    def graded_piece(self, d):
        return SuperFunction._raw(
            {m: p for m, p in self.terms.items() if m.bit_count() == d}
        )

    def __repr__(self):
        if not self.terms:
            return "SuperFunction(0)"
        bits = []
        for m in sorted(self.terms):
            gens = "*".join(f"x{i}" for i in range(m.bit_length()) if m >> i & 1)
            bits.append(f"({self.terms[m]}){'*' + gens if gens else ''}")
        return "SuperFunction(" + " + ".join(bits) + ")"
