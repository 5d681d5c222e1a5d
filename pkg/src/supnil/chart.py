"""Two-chart model of the projective line with a split vector bundle.

Charts U0 (coordinate z) and U1 (coordinate w = 1/z).  Each odd generator
carries an integer twist k; its coefficient slot transforms like sections of
O(m) where m is the slot twist below, so a slot coefficient z^e extends to
U0 iff e >= 0 and to U1 iff e <= m.  First cohomology of a slot of twist m
is represented by the exponents -1 down to m+1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .derivations import BASE, SuperDerivation, term_degree
from .grassmann import SuperFunction
from .laurent import LaurentPoly

U0 = "U0"
U1 = "U1"


class BundleError(ValueError):
    pass


@dataclass(frozen=True)
class BundleSpec:
    """Ordered odd generators with integer twists."""

    names: tuple
    twists: tuple

    def __post_init__(self):
        if not self.names:
            raise BundleError("generator list must be nonempty")
        if len(set(self.names)) != len(self.names):
            raise BundleError("generator names must be unique")
        if len(self.names) != len(self.twists):
            raise BundleError("names and twists must have equal length")
        if "z" in self.names or "w" in self.names:
            raise BundleError("'z' and 'w' are reserved for the base coordinate")

    @classmethod
    def from_pairs(cls, pairs):
        names, twists = zip(*pairs)
        return cls(tuple(names), tuple(int(t) for t in twists))

    @property
    def rank(self):
        return len(self.names)

    def mask_twist(self, mask):
        return sum(self.twists[i] for i in range(mask.bit_length()) if mask >> i & 1)

    def max_even_degree(self):
        return self.rank - (self.rank & 1)


@dataclass
class ChartExpr:
    """A derivation (or function) expression tied to one chart."""

    chart: str
    expr: object

    def __post_init__(self):
        if self.chart not in (U0, U1):
            raise BundleError(f"unknown chart {self.chart!r}")


def monomial_bound(mask, direction, spec):
    """Twist of the coefficient slot (mask, direction).

    Base slots live in O(2 + sum of mask twists); the odd slot d/d(xi_j)
    lives in O(sum of mask twists - twist_j).  A direction index occurring
    in the mask is allowed: the slot is a nonzero derivation regardless.
    """
    if direction == BASE:
        return 2 + spec.mask_twist(mask)
    if not 0 <= direction < spec.rank:
        raise BundleError(f"direction index {direction} out of range")
    return spec.mask_twist(mask) - spec.twists[direction]


def transform(e, spec):
    """Move a chart expression to the other chart.

    Slot coefficients transport by their twist: z^a in a slot of twist m
    becomes w^(m-a) in the matching slot (base slots pick up a sign from
    dw/dz < 0).  transform is an involution and the identity on twists.
    """
    other = U1 if e.chart == U0 else U0
    if isinstance(e.expr, SuperFunction):
        terms = {}
        for mask, poly in e.expr.terms.items():
            shift = spec.mask_twist(mask)
            terms[mask] = poly.reciprocal_substitution().shift(shift)
        return ChartExpr(other, SuperFunction(terms))
    terms = {}
    for (mask, direction), poly in e.expr.terms.items():
        q = poly.reciprocal_substitution().shift(_slot_shift(mask, direction, spec))
        if direction == BASE:
            q = -q
        terms[(mask, direction)] = q
    return ChartExpr(other, SuperDerivation(terms))


def _slot_shift(mask, direction, spec):
    if direction == BASE:
        return 2 + spec.mask_twist(mask)
    return spec.mask_twist(mask) - spec.twists[direction]


def is_global(e, spec):
    """True iff the expression extends to both charts.

    Checks no negative exponents on the given chart and none after
    transform; equivalently every slot coefficient z^a satisfies
    0 <= a <= slot twist.
    """
    expr = e.expr if isinstance(e, ChartExpr) else e
    wrapped = e if isinstance(e, ChartExpr) else ChartExpr(U0, expr)
    if any(p.min_exp() < 0 for p in _polys(expr)):
        return False
    moved = transform(wrapped, spec)
    return all(p.min_exp() >= 0 for p in _polys(moved.expr))


def _polys(expr):
    if isinstance(expr, SuperFunction):
        return expr.terms.values()
    return expr.terms.values()


def iter_slots(spec, degree, parity=None):
    """All (mask, direction) slots of the given Z-degree, canonical order.

    Order: ascending mask, then base direction before odd directions.
    """
    n = spec.rank
    out = []
    for mask in range(1 << n):
        bits = mask.bit_count()
        if bits == degree:
            out.append((mask, BASE))
        if bits == degree + 1:
            for j in range(n):
                out.append((mask, j))
    if parity == "even" and degree & 1:
        return []
    return sorted(out, key=lambda s: (s[0], s[1]))


def global_basis(spec, degree, parity="even"):
    """Basis of the global derivations of one Z-degree as U0 expressions.

    One basis element z^e * slot per slot of twist m >= 0 and 0 <= e <= m,
    ordered by (mask, direction, exponent).
    """
    if parity == "even" and degree & 1:
        return []
    if degree < -1:
        return []
    out = []
    for mask, direction in iter_slots(spec, degree):
        m = monomial_bound(mask, direction, spec)
        for e in range(m + 1):
            out.append(
                SuperDerivation.monomial_term(mask, direction, LaurentPoly.monomial(e))
            )
    return out


def h1_basis(spec, degree):
    """Cohomology representatives per slot: exponents -1 down to m+1 (m <= -2)."""
    out = []
    for mask, direction in iter_slots(spec, degree):
        m = monomial_bound(mask, direction, spec)
        for e in range(-1, m, -1):
            out.append(
                SuperDerivation.monomial_term(mask, direction, LaurentPoly.monomial(e))
            )
    return out


def split_cochain(c, spec, u1_priority=False):
    """Split an overlap derivation into chart-extendable parts plus obstruction.

    Returns (u0, u1, obstruction) with  c = u0 - pullback(u1) + obstruction
    exactly; u0 has only exponents >= 0, u1 (a U1 expression) only
    transform exponents >= 0, and the obstruction only exponents strictly
    between each slot twist and 0.  Exponents extendable to both charts go
    to u0 unless u1_priority is set.
    """
    expr = c.expr if isinstance(c, ChartExpr) else c
    u0_terms, u1_terms, obs_terms = {}, {}, {}
    for (mask, direction), poly in expr.terms.items():
        m = monomial_bound(mask, direction, spec)
        u1_hi = m if u1_priority else min(m, -1)
        for e, coeff in poly.coeffs.items():
            if e <= u1_hi:
                target = u1_terms
            elif e >= 0:
                target = u0_terms
            else:
                target = obs_terms
            key = (mask, direction)
            target.setdefault(key, {})[e] = coeff
    build = lambda d: SuperDerivation(
        {k: LaurentPoly(v) for k, v in d.items()}
    )
    u0 = build(u0_terms)
    u1_on_u0 = build(u1_terms)
    obstruction = build(obs_terms)
    u1 = transform(ChartExpr(U0, -u1_on_u0), spec)
    return u0, u1, obstruction


def pullback(e, spec):
    """U1 expression moved to U0 coordinates (plain transform)."""
    if e.chart != U1:
        raise BundleError("pullback expects a U1 expression")
    return transform(e, spec).expr
