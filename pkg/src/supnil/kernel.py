"""Common kernels of bracket operators [X, .] over the U0 chart.

Kernel elements are ansatz derivations with one unknown coefficient
function per monomial slot.  Each bracket with a supplied field produces,
per output monomial, one linear equation in the unknowns and their first
z-derivatives.  The symbolic solver closes the systems the way the
chart-level arguments do (vanishing on a connected chart, constancy from
vanishing derivatives, exact elimination, rational linear algebra on the
residual constants); a truncated-polynomial oracle provides an independent
cross-check and a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .chart import iter_slots
from .derivations import BASE, SuperDerivation, term_degree, term_parity
from .grassmann import mask_derive, mask_mul
from .laurent import LaurentPoly
from .linalg import nullspace_split, reduce_rows


class SolverIncomplete(Exception):
    """A constraint pattern outside the supported closure rules."""


class InconclusiveKernel(Exception):
    """Truncation oracle did not stabilize; surfaced, never silently accepted."""


@dataclass
class UnknownTemplate:
    """Slot list for one unknown-coefficient ansatz."""

    spec: object
    slots: list
    space: tuple
    parity: str

    def slot_degree(self, i):
        return term_degree(*self.slots[i])

    def degrees(self):
        return sorted({term_degree(*s) for s in self.slots})


def build_template(spec, space, parity="even"):
    """space is ("graded", q) or ("filtration", p); parity "even" or "all"."""
    kind, level = space
    slots = []
    if kind == "graded":
        if parity == "even" and level & 1:
            slots = []
        else:
            slots = iter_slots(spec, level)
    elif kind == "filtration":
        for q in range(level, spec.rank + 1):
            if parity == "even" and q & 1:
                continue
            slots.extend(iter_slots(spec, q))
    else:
        raise ValueError(f"unknown template space {space!r}")
    return UnknownTemplate(spec, slots, (kind, level), parity)


@dataclass
class Constraint:
    """One output-monomial equation: sum of poly * unknown(-derivative) = 0."""

    coeffs: dict
    out_slot: tuple
    field_index: int


@dataclass
class ConstraintSystem:
    template: UnknownTemplate
    fields: list
    rows: list


def derive_constraints(fields, template):
    """Equations from [X, Z] = 0 for every field X against the ansatz Z."""
    spec = template.spec
    rank = spec.rank
    rows = []
    slot_info = [
        (ms, ds, term_degree(ms, ds), term_parity(ms, ds))
        for (ms, ds) in template.slots
    ]
    for fi, f in enumerate(fields):
        out = {}
        for (m1, d1), p1 in f.terms.items():
            deg1 = term_degree(m1, d1)
            par1 = term_parity(m1, d1)
            dp1 = p1.derivative()
            for si, (ms, ds, deg2, par2) in enumerate(slot_info):
                if deg1 + deg2 > rank:
                    continue
                # term 1: p1 * d1(u xi^ms) -> direction ds
                if d1 == BASE:
                    sign, mask = mask_mul(m1, ms)
                    if sign:
                        _acc(out, (mask, ds), (si, 1), p1 if sign == 1 else -p1)
                else:
                    s2, mg = mask_derive(ms, d1)
                    if s2:
                        sign, mask = mask_mul(m1, mg)
                        if sign:
                            q = p1 if sign * s2 == 1 else -p1
                            _acc(out, (mask, ds), (si, 0), q)
                # term 2: -(-1)^(par1 par2) u xi^ms * d_ds(p1 xi^m1) -> dir d1
                extra = 1 if (par1 & par2) else -1
                if ds == BASE:
                    if dp1:
                        sign, mask = mask_mul(ms, m1)
                        if sign:
                            q = dp1 if sign * extra == 1 else -dp1
                            _acc(out, (mask, d1), (si, 0), q)
                else:
                    s2, mg = mask_derive(m1, ds)
                    if s2:
                        sign, mask = mask_mul(ms, mg)
                        if sign:
                            q = p1 if sign * s2 * extra == 1 else -p1
                            _acc(out, (mask, d1), (si, 0), q)
        for out_slot, coeffs in out.items():
            coeffs = {s: p for s, p in coeffs.items() if p}
            if coeffs:
                rows.append(Constraint(coeffs, out_slot, fi))
    return ConstraintSystem(template, list(fields), rows)


def _acc(out, key, sym, poly):
    entry = out.setdefault(key, {})
    prev = entry.get(sym)
    poly = poly if prev is None else prev + poly
    if poly:
        entry[sym] = poly
    else:
        entry.pop(sym, None)


@dataclass
class KernelDescription:
    """free: unconstrained coefficient functions; zero: eliminated unknowns;
    const: unknowns forced constant, with pinned_basis spanning the allowed
    constant tuples; coupled: unknowns tied to each other by an irreducible
    polynomial relation (each still carries nonzero kernel members).
    Witness chains name the (field, output slot) sources."""

    template: UnknownTemplate
    status: list
    pinned_basis: list
    witnesses: dict
    complete: bool = True
    coupled_rows: list = field(default_factory=list)

    def free_slots(self):
        return [
            self.template.slots[i]
            for i, st in enumerate(self.status)
            if st == "free"
        ]

    def zero_slots(self):
        return [
            self.template.slots[i]
            for i, st in enumerate(self.status)
            if st == "zero"
        ]

    def min_degree(self):
        """Minimal Z-degree over nonzero kernel members, or None if empty.

        Coupled unknowns count with their slot degree: an irreducible
        residual relation p u + q v + ... = 0 always has holomorphic
        solutions with every participating unknown nonzero (clear the
        pivot denominators), so each coupled slot carries kernel members.
        """
        degs = [
            self.template.slot_degree(i)
            for i, st in enumerate(self.status)
            if st in ("free", "coupled")
        ]
        for vec in self.pinned_basis:
            degs.append(min(self.template.slot_degree(i) for i in vec))
        return min(degs) if degs else None

    def is_empty(self):
        return self.min_degree() is None

    def dimension_truncated(self, max_poly_degree):
        return len(self.free_slots()) * (max_poly_degree + 1) + len(
            self.pinned_basis
        )


def solve_constraints(system, allow_coupled=False):
    """Fixpoint of the closure rules; raises SolverIncomplete when stuck.

    R1: p(z) u = 0, p != 0  =>  u = 0 on the connected chart.
    R2: p(z) u' = 0         =>  u constant.
    R3: exact elimination over Q(z) treating u, u' as independent symbols.
    R4: residual polynomial identities among flagged constants, expanded
        per power of z and solved over Q.

    With allow_coupled, irreducible residual relations between unknowns are
    reported in the description (status "coupled") instead of raising; the
    minimal-degree computation stays exact for such descriptions.

    An extra evaluation rule backs R4: once every function symbol of a row
    carries a coefficient vanishing to order k at the chart origin, the
    first k Taylor coefficients of the row give rational relations among
    the flagged constants.
    """
    template = system.template
    n = len(template.slots)
    status = ["unknown"] * n
    witnesses = {}
    rows = [
        ({k: v for k, v in c.coeffs.items()}, frozenset([(c.field_index, c.out_slot)]))
        for c in system.rows
    ]
    const_pool = []
    seen_relations = set()

    def set_zero(i, prov):
        status[i] = "zero"
        witnesses.setdefault(i, set()).update(prov)

    def set_const(i, prov):
        if status[i] == "unknown":
            status[i] = "const"
            witnesses.setdefault(i, set()).update(prov)

    while True:
        progress = True
        while progress:
            progress = False
            kept = []
            for coeffs, prov in rows:
                coeffs = {
                    (i, o): p
                    for (i, o), p in coeffs.items()
                    if p and status[i] != "zero" and not (o == 1 and status[i] == "const")
                }
                if not coeffs:
                    progress = True
                    continue
                if len(coeffs) == 1:
                    (i, order), p = next(iter(coeffs.items()))
                    if order == 0:
                        set_zero(i, prov)  # R1 (also kills flagged constants)
                    else:
                        set_const(i, prov)  # R2
                    progress = True
                    continue
                if all(o == 0 and status[i] == "const" for (i, o) in coeffs):
                    const_pool.append((coeffs, prov))
                    progress = True
                    continue
                kept.append((coeffs, prov))
            rows = kept
        if rows:
            reduced = _eliminate(rows)
            if reduced is not None:
                rows = reduced
                continue
        # evaluation rule: Taylor coefficients at the origin that no
        # function symbol reaches give relations among the constants
        emitted = False
        for coeffs, prov in rows:
            fun_min = min(
                (
                    p.min_exp()
                    for (i, o), p in coeffs.items()
                    if not (o == 0 and status[i] == "const")
                ),
                default=None,
            )
            if fun_min is None or fun_min <= 0:
                continue
            for e in range(fun_min):
                rel = {}
                for (i, o), p in coeffs.items():
                    if o == 0 and status[i] == "const":
                        c = p.coeffs.get(e)
                        if c:
                            rel[(i, 0)] = LaurentPoly({0: c})
                sig = frozenset((s, tuple(sorted(p.coeffs.items()))) for s, p in rel.items())
                if rel and sig not in seen_relations:
                    seen_relations.add(sig)
                    const_pool.append((rel, prov))
                    emitted = True
        if emitted:
            continue
        # R4 on the pool; newly zeroed constants feed back into the rows
        zeroed = _r4_forced_zeros(const_pool, status)
        if zeroed:
            for i, prov in zeroed:
                set_zero(i, prov)
            const_pool = [
                ({s: p for s, p in coeffs.items() if status[s[0]] != "zero"}, prov)
                for coeffs, prov in const_pool
            ]
            const_pool = [(c, p) for c, p in const_pool if c]
            continue
        break

    if rows and not allow_coupled:
        raise SolverIncomplete(
            f"{len(rows)} constraint rows outside the closure rules"
        )

    pinned_basis = _solve_const_rows(const_pool, status, witnesses, template)

    coupled_rows = []
    for coeffs, prov in rows:
        for i, _o in coeffs:
            if status[i] in ("unknown", "const"):
                status[i] = "coupled"
                witnesses.setdefault(i, set()).update(prov)
        coupled_rows.append(({k: v for k, v in coeffs.items()}, sorted(prov)))

    for i in range(n):
        if status[i] == "unknown":
            status[i] = "free"
    witnesses = {i: sorted(w) for i, w in witnesses.items()}
    return KernelDescription(
        template, status, pinned_basis, witnesses,
        complete=not coupled_rows, coupled_rows=coupled_rows,
    )


def _r4_forced_zeros(const_pool, status):
    """Constants provably zero from the current rational relation pool."""
    const_idx = [i for i, st in enumerate(status) if st == "const"]
    if not const_idx or not const_pool:
        return []
    qrows = []
    prov_by_slot = {}
    for coeffs, prov in const_pool:
        coeffs = {s: p for s, p in coeffs.items() if status[s[0]] == "const"}
        exps = sorted({e for p in coeffs.values() for e in p.coeffs})
        for e in exps:
            row = {}
            for (i, _o), p in coeffs.items():
                c = p.coeffs.get(e)
                if c:
                    row[i] = c
                    prov_by_slot.setdefault(i, set()).update(prov)
            if row:
                qrows.append(row)
    basis = nullspace_split(qrows, const_idx)
    touched = {i for v in basis for i in v}
    out = []
    for i in const_idx:
        if i not in touched:
            out.append((i, prov_by_slot.get(i, set())))
    return out


def _eliminate(rows):
    """One echelon pass over Q(z); returns new rows or None if unchanged."""
    pivots = {}
    changed = False
    for coeffs, prov in rows:
        coeffs = dict(coeffs)
        prov = set(prov)
        while coeffs:
            sym = min(coeffs)
            hit = pivots.get(sym)
            if hit is None:
                pivots[sym] = (_normalize_row(coeffs), frozenset(prov))
                break
            pc, pp = hit
            f1, f2 = pc[sym], coeffs[sym]
            merged = {}
            for s, p in coeffs.items():
                merged[s] = p * f1
            for s, p in pc.items():
                q = merged.get(s, LaurentPoly.zero()) - f2 * p
                if q:
                    merged[s] = q
                else:
                    merged.pop(s, None)
            coeffs = merged
            prov |= pp
            changed = True
    out = [(c, p) for (c, p) in pivots.values()]
    if not changed and len(out) == len(rows):
        return None
    return out


def _normalize_row(coeffs):
    shift = min(p.min_exp() for p in coeffs.values())
    if shift:
        coeffs = {s: p.shift(-shift) for s, p in coeffs.items()}
    return coeffs


def _solve_const_rows(const_rows, status, witnesses, template):
    """Expand polynomial identities among constants per z power; solve over Q."""
    const_idx = [i for i, st in enumerate(status) if st == "const"]
    if not const_idx:
        return []
    qrows = []
    prov_by_slot = {}
    for coeffs, prov in const_rows:
        coeffs = {s: p for s, p in coeffs.items() if status[s[0]] == "const"}
        exps = sorted({e for p in coeffs.values() for e in p.coeffs})
        for e in exps:
            row = {}
            for (i, _o), p in coeffs.items():
                c = p.coeffs.get(e)
                if c:
                    row[i] = c
                    prov_by_slot.setdefault(i, set()).update(prov)
            if row:
                qrows.append(row)
    basis = nullspace_split(qrows, const_idx)
    touched = {i for v in basis for i in v}
    pinned = []
    for v in basis:
        pinned.append(dict(v))
    for i in const_idx:
        if i not in touched:
            status[i] = "zero"
            witnesses.setdefault(i, set()).update(prov_by_slot.get(i, set()))
    # drop pinned vectors that are plain "this single constant is free"?
    # no: keep them; they are the residual solution space.
    return pinned


# -- truncation oracle -----------------------------------------------------


@dataclass
class TruncatedKernel:
    template: UnknownTemplate
    max_poly_degree: int
    dimension: int
    slot_rank: dict
    basis: list

    def slot_classification(self):
        out = {}
        full = self.max_poly_degree + 1
        for i in range(len(self.template.slots)):
            r = self.slot_rank.get(i, 0)
            out[i] = "free" if r == full else ("zero" if r == 0 else f"dim={r}")
        return out

    def min_degree(self):
        degs = set()
        for vec in self.basis:
            degs.add(min(self.template.slot_degree(i) for (i, _a) in vec))
        return min(degs) if degs else None


def _stable_labels(runs):
    """Per-slot label across oracle runs of increasing truncation degree.

    Stable patterns: identically zero, full coefficient space ("free"),
    constant rank ("dim=k"), or rank growing by one per extra degree
    ("cofree", a shifted full module such as z^k C[z]).  Returns None for
    a slot fitting no pattern.
    """
    labels = {}
    for i in range(len(runs[0].template.slots)):
        ranks = [run.slot_rank.get(i, 0) for run in runs]
        fulls = [run.max_poly_degree + 1 for run in runs]
        if all(r == 0 for r in ranks):
            labels[i] = "zero"
        elif all(r == f for r, f in zip(ranks, fulls)):
            labels[i] = "free"
        elif all(r == ranks[0] for r in ranks):
            labels[i] = f"dim={ranks[0]}"
        elif all(
            ranks[k + 1] - ranks[k] == 1 for k in range(len(ranks) - 1)
        ):
            labels[i] = f"cofree[{fulls[0] - ranks[0]}]"
        else:
            return None
    return labels


def common_kernel_truncated(fields, template, max_poly_degree):
    """Kernel with every unknown restricted to polynomials of degree <= D."""
    system = derive_constraints(fields, template)
    D = max_poly_degree
    qrows = []
    for c in system.rows:
        by_exp = {}
        for (i, order), p in c.coeffs.items():
            for a in range(D + 1):
                if order == 0:
                    contrib = p.shift(a)
                else:
                    if a == 0:
                        continue
                    contrib = p.shift(a - 1) * a
                for e, v in contrib.coeffs.items():
                    row = by_exp.setdefault(e, {})
                    s = row.get((i, a), 0) + v
                    if s:
                        row[(i, a)] = s
                    else:
                        row.pop((i, a), None)
        qrows.extend(r for r in by_exp.values() if r)
    columns = [(i, a) for i in range(len(template.slots)) for a in range(D + 1)]
    basis = nullspace_split(qrows, columns)
    slot_rank = {}
    by_slot = {}
    for vec in basis:
        for (i, a), v in vec.items():
            by_slot.setdefault(i, []).append(vec)
    for i, vecs in by_slot.items():
        rows = [{a: v for (j, a), v in vec.items() if j == i} for vec in vecs]
        slot_rank[i] = len(reduce_rows(rows, lambda a: a))
    return TruncatedKernel(template, D, len(basis), slot_rank, basis)


def stabilized_truncated(fields, template, max_poly_degree, window=2):
    """Rerun the oracle at D, D+1, ..., checking the slot classification.

    Raises InconclusiveKernel if some slot fits no stable pattern inside
    the window.  Returns (first run, per-slot labels).
    """
    runs = [
        common_kernel_truncated(fields, template, max_poly_degree + k)
        for k in range(window + 1)
    ]
    labels = _stable_labels(runs)
    if labels is None:
        raise InconclusiveKernel(
            "slot classification changed under truncation degree increase"
        )
    return runs[0], labels


def oracle_agrees(description, truncated):
    """Slot-level agreement between the symbolic solve and the oracle."""
    cls = truncated.slot_classification()
    for i, st in enumerate(description.status):
        if st == "free" and cls[i] != "free":
            return False
        if st == "zero" and cls[i] != "zero":
            return False
    if description.complete:
        expected = description.dimension_truncated(truncated.max_poly_degree)
        return expected == truncated.dimension
    return True


# -- kernel-based degrees ----------------------------------------------------


def graded_kernel(spec, leading_fields, q, oracle_degree=20, window=2):
    """Common kernel of the leading parts on one graded piece."""
    template = build_template(spec, ("graded", q), parity="all")
    if not template.slots:
        return KernelDescription(template, [], [], {})
    system = derive_constraints(leading_fields, template)
    return solve_constraints(system, allow_coupled=True)


def _certain_min_degree(desc):
    """Minimum over the parts of a description that need no certificate."""
    degs = [
        desc.template.slot_degree(i)
        for i, st in enumerate(desc.status)
        if st == "free"
    ]
    for vec in desc.pinned_basis:
        if all(desc.status[i] != "coupled" for i in vec):
            degs.append(min(desc.template.slot_degree(i) for i in vec))
    return min(degs) if degs else None


def kernel_min_degree(
    fields, spec, parity, start_degree, oracle_degree=20, window=2
):
    """Minimal leading degree of the common kernel over all supplied fields.

    Computed stage by stage: a graded prefilter against the leading parts
    skips degrees that cannot carry a kernel element; the first surviving
    stage triggers one full inhomogeneous solve whose description gives the
    minimum.  A minimum claimed only by coupled unknowns is certified by
    the truncation oracle (a polynomial solution is an exact witness).
    """
    leadings = [f.leading_part()[1] for f in fields if f]
    for q in range(start_degree, spec.rank + 1):
        if parity == "even" and q & 1:
            continue
        pre = graded_kernel(spec, leadings, q, oracle_degree, window)
        if pre.is_empty():
            continue
        template = build_template(spec, ("filtration", q), parity)
        system = derive_constraints(fields, template)
        desc = solve_constraints(system, allow_coupled=True)
        md = desc.min_degree()
        if md is None:
            continue
        if md == _certain_min_degree(desc):
            return md, desc
        # a polynomial kernel element of the claimed leading degree is an
        # exact witness; a small truncation suffices for the certificate
        witness_degree = max(8, 2 * spec.rank)
        run = common_kernel_truncated(fields, template, witness_degree)
        if run.min_degree() == md:
            return md, desc
        raise InconclusiveKernel(
            f"coupled kernel minimum {md} not certified by the oracle"
        )
    raise InconclusiveKernel("no kernel support found up to the top degree")


def nildominance_degree(fields, spec, oracle_degree=20, window=2):
    """Largest even 2s with every kernel element of degree >= 2s.

    fields: U0 restrictions of the global even degree->=2 fields."""
    md, _ = kernel_min_degree(fields, spec, "even", 2, oracle_degree, window)
    return md


def graded_nildominance_degree(fields, spec, oracle_degree=20, window=2):
    """Same bound computed against the leading parts on the split sheaf."""
    leadings = [f.leading_part()[1] for f in fields if f]
    for q in range(2, spec.rank + 1, 2):
        desc = graded_kernel(spec, leadings, q, oracle_degree, window)
        if not desc.is_empty():
            return q
    raise InconclusiveKernel("graded kernel empty up to the top degree")


def strict_nildominance_degree(fields, spec, oracle_degree=20, window=2):
    """Largest t with the full-derivation common kernel inside degree >= t."""
    md, _ = kernel_min_degree(fields, spec, "all", -1, oracle_degree, window)
    return md
