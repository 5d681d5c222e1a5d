"""Deformed two-chart models: gluing, degree-by-degree lifting, splitness.

The deformation is a gluing automorphism exp(Y) on the chart overlap, Y an
even derivation of filtration degree >= 2 written in U0 coordinates.  A
global field is a pair (x0, x1) of chart expressions with
x0 = alpha (pullback x1) alpha^{-1} exactly on the overlap.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .chart import (
    U0,
    U1,
    BundleSpec,
    ChartExpr,
    global_basis,
    pullback,
    split_cochain,
    transform,
)
from .derivations import SuperAutomorphism, SuperDerivation
from .laurent import LaurentPoly
from .linalg import nullspace_split


class DeformationError(ValueError):
    pass


def validate_deformation_log(log, spec):
    """Even parity, filtration degree >= 2, Laurent coefficients only."""
    if not log:
        return log
    if not log.is_even():
        raise DeformationError("deformation log must be even")
    if log.min_degree() < 2:
        raise DeformationError("deformation log must have filtration degree >= 2")
    return log


@dataclass
class DeformedModel:
    spec: BundleSpec
    log_alpha: SuperDerivation

    def __post_init__(self):
        validate_deformation_log(self.log_alpha, self.spec)
        self._aut = SuperAutomorphism(self.log_alpha)

    @property
    def automorphism(self):
        return self._aut

    def is_split_presentation(self):
        return not self.log_alpha


@dataclass
class GlobalFieldPair:
    """U0 and U1 expressions of one global field of the deformed model."""

    x0: SuperDerivation
    x1: ChartExpr

    def __post_init__(self):
        if self.x1.chart != U1:
            raise DeformationError("x1 must be a U1 expression")


def glue_check(model, pair):
    """Exact test of x0 == alpha (pullback x1) alpha^{-1}."""
    moved = pullback(pair.x1, model.spec)
    return model.automorphism.conjugate(moved) == pair.x0


def pair_from_u0(model, x0_overlap_accumulator):
    """Build the pair determined by the U1-side accumulator A:
    x1 = transform(A), x0 = alpha A alpha^{-1}."""
    x0 = model.automorphism.conjugate(x0_overlap_accumulator)
    x1 = transform(ChartExpr(U0, x0_overlap_accumulator), model.spec)
    return GlobalFieldPair(x0, x1)


def _ad_series_tail(aut, a):
    """conjugate(a) - a: the degree-raising part of the gluing defect."""
    return aut.conjugate(a) - a


def defect_sweep(model, lead, u1_only=False, u1_priority=None):
    """Absorb the gluing defect of a leading candidate degree by degree.

    Returns (accumulator, violations) where accumulator is the U1-side
    expression built from `lead` by absorbing each degree's defect into the
    U1 chart (and, unless u1_only, the U0 chart), and violations maps
    (degree, mask, direction, exponent) to the defect coefficients that
    could not be absorbed: cohomology obstructions always, U0-required
    corrections too when u1_only is set.  The sweep is linear in `lead`.

    u1_priority picks the chart that absorbs defect parts extendable to
    both; corrections are unique only up to global fields of higher degree
    and the lifted span does not depend on the choice.
    """
    spec = model.spec
    acc = lead
    violations = {}
    d = lead.min_degree() if lead else 2
    if u1_priority is None:
        u1_priority = u1_only
    for e in range(d + 2, spec.rank + 1, 2):
        defect = _ad_series_tail(model.automorphism, acc).graded_piece(e)
        if not defect:
            continue
        u0, u1, obstruction = split_cochain(defect, spec, u1_priority=u1_priority)
        for (mask, direction), poly in obstruction.terms.items():
            for exp, c in poly.coeffs.items():
                violations[(e, mask, direction, exp)] = c
        if u1_only:
            for (mask, direction), poly in u0.terms.items():
                for exp, c in poly.coeffs.items():
                    violations[(e, mask, direction, exp)] = c
        # x1 correction in U0 coordinates: pullback(u1) = u0 - defect + obs
        acc = acc + (u0 - defect + obstruction)
    return acc, violations


def lift_fields(model, max_degree=None, u1_only=False, u1_priority=None):
    """Basis of the even global fields of filtration degree >= 2.

    Computed degree by degree: split-model candidates at each leading
    degree, gluing defects split per higher degree, kernel of the resulting
    obstruction map kept.  With u1_only, only candidates needing no U0
    correction at any degree are kept (all corrections on U1).
    """
    spec = model.spec
    top = spec.max_even_degree()
    if max_degree is None:
        max_degree = spec.rank
    out = []
    for d in range(2, min(max_degree, top) + 1, 2):
        out.extend(_lift_at_degree(model, d, u1_only, u1_priority))
    return out


def _lift_at_degree(model, d, u1_only, u1_priority=None):
    spec = model.spec
    candidates = global_basis(spec, d)
    if not candidates:
        return []
    sweeps = [defect_sweep(model, c, u1_only, u1_priority) for c in candidates]
    rows = {}
    for i, (_, violations) in enumerate(sweeps):
        for coord, value in violations.items():
            rows.setdefault(coord, {})[i] = value
    kernel = nullspace_split(list(rows.values()), range(len(candidates)))
    pairs = []
    for vec in kernel:
        lead = SuperDerivation.zero()
        for i, coeff in sorted(vec.items()):
            lead = lead + candidates[i] * coeff
        acc, violations = defect_sweep(model, lead, u1_only, u1_priority)
        if violations:
            raise DeformationError("lift kernel vector left a nonzero violation")
        pair = pair_from_u0(model, acc)
        if u1_only and pair.x0 != lead:
            raise DeformationError("u1-only lift produced a U0 correction")
        pairs.append(pair)
    return pairs


def chart0_fields(model, max_degree=None):
    """U0 expressions of a lift basis; input to the kernel analyses."""
    return [p.x0 for p in lift_fields(model, max_degree=max_degree)]


def family_lift_exponents(model, mask, direction, u1_only=False):
    """Exponents e for which the single term z^e * slot lifts on its own.

    Mixed leading terms are deliberately excluded here: this is the
    per-family bookkeeping behind the lift condition tables.  With u1_only
    the candidate must need no U0 correction at any degree.
    """
    from .chart import monomial_bound

    bound = monomial_bound(mask, direction, model.spec)
    out = []
    for e in range(bound + 1):
        lead = SuperDerivation.monomial_term(mask, direction, LaurentPoly.monomial(e))
        _, violations = defect_sweep(model, lead, u1_only)
        if not violations:
            out.append(e)
    return out


def pure_field_list(model, degree, u1_only=True):
    """All single-slot fields z^e * slot of one leading degree that lift.

    With u1_only these are the fields whose U0 restriction is the pure
    leading term (all corrections absorbed on the other chart); they are
    the bracket inputs for the chart-level kernel tables.
    """
    from .chart import iter_slots

    out = []
    for mask, direction in iter_slots(model.spec, degree):
        for e in family_lift_exponents(model, mask, direction, u1_only):
            out.append(
                SuperDerivation.monomial_term(mask, direction, LaurentPoly.monomial(e))
            )
    return out


def leading_fields(fields):
    """Leading graded parts, one per field, zero fields skipped."""
    out = []
    for f in fields:
        if f:
            out.append(f.leading_part()[1])
    return out


def splitness_profile(model):
    """Minimal degree whose deformation class survives coboundary absorption.

    Greedy: normalize the gluing log degree by degree, subtracting chart
    extendable parts and recomposing the automorphism exactly; returns the
    first degree with a nonzero obstruction, or "split".
    """
    spec = model.spec
    aut = model.automorphism
    n = spec.rank
    for d in range(2, spec.max_even_degree() + 1, 2):
        piece = aut.log.graded_piece(d)
        if not piece:
            continue
        u0, u1, obstruction = split_cochain(piece, spec)
        if obstruction:
            return d
        left = SuperAutomorphism(-u0)
        right = SuperAutomorphism(pullback(u1, spec))
        aut = left.compose(aut, n).compose(right, n)
        if aut.log.graded_piece(d):
            raise DeformationError("normalization failed to clear a degree")
    if aut.log:
        return aut.log.min_degree()
    return "split"
