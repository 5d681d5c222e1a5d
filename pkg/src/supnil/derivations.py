"""Superderivations on one chart: bracket calculus, grading, exp/log.

A derivation is a finite sum of terms (Laurent coefficient) * (odd monomial)
* (coordinate direction).  Directions: BASE (= -1) for d/dz, a generator
index j for d/d(xi_j).  Terms are kept in coefficients-left normal form; the
Z-degree of a term is |monomial| for BASE and |monomial| - 1 otherwise.
"""

from __future__ import annotations

from fractions import Fraction

from .grassmann import SuperFunction, mask_derive, mask_mul
from .laurent import LaurentPoly

BASE = -1


def term_degree(mask, direction):
    return mask.bit_count() - (0 if direction == BASE else 1)


def term_parity(mask, direction):
    return (mask.bit_count() + (0 if direction == BASE else 1)) & 1


class SuperDerivation:
    """Superderivation in canonical form: {(mask, direction): LaurentPoly}."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for key, poly in items:
                if not isinstance(poly, LaurentPoly):
                    poly = LaurentPoly({0: poly})
                if poly:
                    prev = data.get(key)
                    poly = poly if prev is None else prev + poly
                    if poly:
                        data[key] = poly
                    else:
                        del data[key]
        self.terms = data

    @classmethod
    def _raw(cls, data):
        d = cls.__new__(cls)
        d.terms = data
        return d

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial_term(cls, mask, direction, poly):
        if not isinstance(poly, LaurentPoly):
            poly = LaurentPoly({0: poly})
        return cls({(mask, direction): poly}) if poly else cls()

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, SuperDerivation):
            return NotImplemented
        return self.terms == other.terms

    def __add__(self, other):
        data = dict(self.terms)
        for k, p in other.terms.items():
            s = data.get(k)
            s = p if s is None else s + p
            if s:
                data[k] = s
            else:
                data.pop(k, None)
        return SuperDerivation._raw(data)

    def __neg__(self):
        return SuperDerivation._raw({k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        if not scalar:
            return SuperDerivation()
        return SuperDerivation._raw({k: p * scalar for k, p in self.terms.items()})

    __rmul__ = __mul__

    # -- grading ---------------------------------------------------------

    def degrees(self):
        return sorted({term_degree(m, d) for (m, d) in self.terms})

    def grade_decompose(self):
        """Split into Z-homogeneous parts, as {degree: SuperDerivation}."""
        out = {}
        for (m, d), p in self.terms.items():
            out.setdefault(term_degree(m, d), {})[(m, d)] = p
        return {k: SuperDerivation._raw(v) for k, v in sorted(out.items())}

    def graded_piece(self, degree):
        return SuperDerivation._raw(
            {k: p for k, p in self.terms.items() if term_degree(*k) == degree}
        )

    def leading_part(self):
        """(k, X_k): the minimal Z-degree and its homogeneous component."""
        if not self.terms:
            raise ValueError("the zero derivation has no leading part")
        k = min(term_degree(m, d) for (m, d) in self.terms)
        return k, self.graded_piece(k)

    def min_degree(self):
        return self.leading_part()[0]

    def is_even(self):
        return all(term_parity(m, d) == 0 for (m, d) in self.terms)

    def is_odd(self):
        return all(term_parity(m, d) == 1 for (m, d) in self.terms)

    def parity_piece(self, parity):
        return SuperDerivation._raw(
            {k: p for k, p in self.terms.items() if term_parity(*k) == parity}
        )

    # -- action on functions ---------------------------------------------

    def apply(self, f):
        """Graded Leibniz action on a SuperFunction."""
        out = {}
        for (m1, d1), p1 in self.terms.items():
            for mf, pf in f.terms.items():
                if d1 == BASE:
                    g = pf.derivative()
                    if not g:
                        continue
                    mg = mf
                else:
                    sign, mg = mask_derive(mf, d1)
                    if not sign:
                        continue
                    g = pf if sign == 1 else -pf
                sign, mask = mask_mul(m1, mg)
                if not sign:
                    continue
                q = p1 * g if sign == 1 else -(p1 * g)
                s = out.get(mask)
                q = q if s is None else s + q
                if q:
                    out[mask] = q
                else:
                    out.pop(mask, None)
        return SuperFunction._raw(out)

    def __repr__(self):
        if not self.terms:
            return "SuperDerivation(0)"
        return f"SuperDerivation({len(self.terms)} terms)"


def bracket(x, y):
    """Super Lie bracket [x, y] = x o y - (-1)^{|x||y|} y o x.

    Computed term by term: for homogeneous terms f*da and g*db,
    [f da, g db] = f*da(g)*db - (-1)^(|f da||g db|) g*db(f)*da.
    """
    out = {}

    def accumulate(coeff_mask, coeff_poly, gmask, gpoly, direction, extra):
        sign, mask = mask_mul(coeff_mask, gmask)
        if not sign:
            return
        q = coeff_poly * gpoly
        if sign * extra == -1:
            q = -q
        key = (mask, direction)
        s = out.get(key)
        q = q if s is None else s + q
        if q:
            out[key] = q
        else:
            out.pop(key, None)

    for (m1, d1), p1 in x.terms.items():
        par1 = term_parity(m1, d1)
        for (m2, d2), p2 in y.terms.items():
            par2 = term_parity(m2, d2)
            # term 1: f * da(g) -> direction db
            if d1 == BASE:
                g = p2.derivative()
                if g:
                    accumulate(m1, p1, m2, g, d2, 1)
            else:
                sign, mg = mask_derive(m2, d1)
                if sign:
                    accumulate(m1, p1, mg, p2 if sign == 1 else -p2, d2, 1)
            # term 2: -(-1)^(par1*par2) g * db(f) -> direction da
            extra = 1 if (par1 & par2) else -1
            if d2 == BASE:
                g = p1.derivative()
                if g:
                    accumulate(m2, p2, m1, g, d1, extra)
            else:
                sign, mg = mask_derive(m1, d2)
                if sign:
                    accumulate(m2, p2, mg, p1 if sign == 1 else -p1, d1, extra)

    return SuperDerivation._raw(out)


def derivation_from_generator_action(base_image, odd_images):
    """Rebuild a derivation from its values on z and the odd generators."""
    terms = {}

    def add(mask, direction, poly):
        key = (mask, direction)
        s = terms.get(key)
        poly = poly if s is None else s + poly
        if poly:
            terms[key] = poly
        else:
            terms.pop(key, None)

    for mask, poly in base_image.terms.items():
        add(mask, BASE, poly)
    for j, img in odd_images.items():
        for mask, poly in img.terms.items():
            add(mask, j, poly)
    return SuperDerivation._raw(terms)


class SuperAutomorphism:
    """exp of an even derivation of filtration degree >= 2.

    Stored by its logarithm; all series below terminate because each factor
    raises the Z-degree by at least 2 and the odd dimension is finite.
    """

    __slots__ = ("log",)

    def __init__(self, log):
        if log:
            if not log.is_even():
                raise ValueError("automorphism logarithm must be even")
            if log.min_degree() < 2:
                raise ValueError(
                    "automorphism logarithm must have filtration degree >= 2"
                )
        self.log = log

    @classmethod
    def identity(cls):
        return cls(SuperDerivation.zero())

    def is_identity(self):
        return not self.log

    def inverse(self):
        return SuperAutomorphism(-self.log)

    def apply(self, f):
        """exp(log) acting on a superfunction; finite by nilpotency."""
        result = f
        term = f
        n = 0
        while True:
            term = self.log.apply(term)
            if not term:
                return result
            n += 1
            scaled = term * Fraction(1, _factorial(n))
            result = result + scaled

    def conjugate(self, x):
        """alpha x alpha^{-1} = sum ad_log^n(x) / n!; finite."""
        result = x
        term = x
        n = 0
        while True:
            term = bracket(self.log, term)
            if not term:
                return result
            n += 1
            result = result + _scale_derivation(term, Fraction(1, _factorial(n)))

    def compose(self, other, n_gen):
        """Operator composition self o other, returned as an automorphism.

        The composite is unipotent, so its operator logarithm is again an
        even degree->=2 derivation; it is recovered from the action on the
        chart generators (n_gen odd generators plus the base variable).
        """
        gens = [SuperFunction.base_var()] + [
            SuperFunction.generator(i) for i in range(n_gen)
        ]

        def gamma(f):
            return self.apply(other.apply(f))

        images = []
        for g in gens:
            # log via the alternating operator series on gamma - id
            n = 1
            acc = SuperFunction.zero()
            term = gamma(g) - g
            while term:
                acc = acc + term * Fraction((-1) ** (n + 1), n)
                term = gamma(term) - term
                n += 1
            images.append(acc)
        log = derivation_from_generator_action(
            images[0], {i: images[i + 1] for i in range(n_gen)}
        )
        return SuperAutomorphism(log)


def _scale_derivation(d, scalar):
    return SuperDerivation._raw({k: p * scalar for k, p in d.terms.items()})


_FACTORIALS = [1, 1]


def _factorial(n):
    while len(_FACTORIALS) <= n:
        _FACTORIALS.append(_FACTORIALS[-1] * len(_FACTORIALS))
    return _FACTORIALS[n]


def exp_automorphism(log):
    """Public constructor with the validation the bracket calculus needs."""
    return SuperAutomorphism(log)


def log_automorphism(alpha):
    return alpha.log
