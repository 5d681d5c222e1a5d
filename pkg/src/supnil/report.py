"""Scenario ingestion, analysis orchestration, report rendering.

A scenario is a JSON document; the report is a deterministic nested dict
rendered to canonical JSON or markdown.  Identical scenario bytes produce
identical report bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .chart import BundleSpec, iter_slots, monomial_bound
from .deformation import (
    DeformationError,
    DeformedModel,
    chart0_fields,
    family_lift_exponents,
    lift_fields,
    splitness_profile,
)
from .derivations import BASE, SuperDerivation
from .expr import ExprError, format_derivation, format_slot, parse_derivation
from .kernel import (
    InconclusiveKernel,
    build_template,
    common_kernel_truncated,
    derive_constraints,
    graded_kernel,
    graded_nildominance_degree,
    nildominance_degree,
    oracle_agrees,
    solve_constraints,
    strict_nildominance_degree,
)

ANALYSES = (
    "global-fields",
    "lift",
    "kernel",
    "nildominance",
    "graded-nildominance",
    "strict-nildominance",
    "splitness",
)


class ScenarioError(ValueError):
    """Carries a list of precise validation errors."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class Scenario:
    bundle: BundleSpec
    deformation: SuperDerivation
    deformation_text: str
    analyses: tuple
    truncation_degree: int = 20
    stabilization_window: int = 2
    max_lift_degree: int = None

    def model(self):
        return DeformedModel(self.bundle, self.deformation)


def parse_scenario(text):
    errors = []
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError([f"invalid JSON: {e}"]) from e
    if not isinstance(doc, dict):
        raise ScenarioError(["top level must be a JSON object"])

    bundle = doc.get("bundle")
    gens = []
    if not isinstance(bundle, dict) or "generators" not in bundle:
        errors.append("missing bundle.generators")
    else:
        raw = bundle["generators"]
        if not isinstance(raw, list) or not raw:
            errors.append("bundle.generators: empty generators list")
        else:
            for k, g in enumerate(raw):
                if not isinstance(g, dict) or "name" not in g or "twist" not in g:
                    errors.append(f"bundle.generators[{k}]: need name and twist")
                    continue
                if not isinstance(g["twist"], int):
                    errors.append(f"bundle.generators[{k}]: twist must be an integer")
                    continue
                gens.append((str(g["name"]), g["twist"]))
    spec = None
    if gens and not errors:
        try:
            spec = BundleSpec.from_pairs(gens)
        except Exception as e:
            errors.append(f"bundle: {e}")

    deformation = SuperDerivation.zero()
    text_def = doc.get("deformation")
    if text_def is not None and spec is not None:
        if not isinstance(text_def, str):
            errors.append("deformation: must be a string or null")
        else:
            try:
                deformation = parse_derivation(text_def, spec.names)
            except ExprError as e:
                errors.append(f"deformation: {e}")
            else:
                if deformation and not deformation.is_even():
                    errors.append("deformation: odd-parity deformation rejected")
                elif deformation and deformation.min_degree() < 2:
                    errors.append(
                        "deformation: filtration degree < 2 rejected"
                    )

    analyses = doc.get("analyses", list(ANALYSES))
    if not isinstance(analyses, list):
        errors.append("analyses: must be a list")
        analyses = []
    for a in analyses:
        if a not in ANALYSES:
            errors.append(f"analyses: unknown analysis {a!r}")

    options = doc.get("options", {})
    if not isinstance(options, dict):
        errors.append("options: must be an object")
        options = {}
    trunc = options.get("truncation_degree", 20)
    window = options.get("stabilization_window", 2)
    max_lift = options.get("max_lift_degree")
    for key, val in (("truncation_degree", trunc), ("stabilization_window", window)):
        if not isinstance(val, int) or val < 0:
            errors.append(f"options.{key}: must be a nonnegative integer")
    if max_lift is not None and (not isinstance(max_lift, int) or max_lift < 2):
        errors.append("options.max_lift_degree: must be an integer >= 2")

    if errors:
        raise ScenarioError(errors)
    return Scenario(
        bundle=spec,
        deformation=deformation,
        deformation_text=text_def or "",
        analyses=tuple(a for a in ANALYSES if a in analyses),
        truncation_degree=trunc,
        stabilization_window=window,
        max_lift_degree=max_lift if max_lift is not None else spec.rank,
    )


@dataclass
class Report:
    scenario: dict
    sections: dict
    inconclusive: list = field(default_factory=list)

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "sections": self.sections,
            "inconclusive": self.inconclusive,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["scenario"], d["sections"], list(d.get("inconclusive", [])))


def _class_label(spec, i):
    name = spec.names[i]
    prefix = name.rstrip("0123456789") or name
    twin = [j for j in range(spec.rank) if spec.twists[j] == spec.twists[i]]
    if all((spec.names[j].rstrip("0123456789") or spec.names[j]) == prefix for j in twin):
        return prefix
    return f"O({spec.twists[i]})"


def _family_key(spec, mask, direction):
    counts = {}
    for i in range(spec.rank):
        if mask >> i & 1:
            lbl = _class_label(spec, i)
            counts[lbl] = counts.get(lbl, 0) + 1
    dir_lbl = "z" if direction == BASE else _class_label(spec, direction)
    return (tuple(sorted(counts.items())), dir_lbl)


def _family_string(key, base_var="z"):
    counts, dir_lbl = key
    parts = []
    for lbl, c in counts:
        parts.append(lbl if c == 1 else f"{lbl}^{c}")
    head = "*".join(parts)
    return (head + "*" if head else "") + f"d({dir_lbl})"


def global_field_table(spec, degree):
    """Rows (family, bound, #slots, dimension) for one Z-degree."""
    rows = {}
    for mask, direction in iter_slots(spec, degree):
        bound = monomial_bound(mask, direction, spec)
        key = _family_key(spec, mask, direction)
        entry = rows.setdefault(key, {"bound": bound, "slots": 0, "dimension": 0})
        entry["slots"] += 1
        if bound >= 0:
            entry["dimension"] += bound + 1
    out = []
    for key in sorted(rows, key=lambda k: (k[1] != "z", k[1], k[0])):
        entry = rows[key]
        out.append(
            {
                "family": _family_string(key),
                "bound": entry["bound"],
                "slots": entry["slots"],
                "dimension": entry["dimension"],
            }
        )
    return out


def _exponent_summary(exps):
    if not exps:
        return ""
    lo, hi = min(exps), max(exps)
    if exps == list(range(lo, hi + 1)):
        if lo == 0:
            return f"C[z]<={hi}"
        return f"z^{lo}*C[z]<={hi - lo}"
    return "{" + ",".join(f"z^{e}" for e in exps) + "}"


def run(scenario):
    """Execute the requested analyses in dependency order."""
    spec = scenario.bundle
    model = scenario.model()
    sections = {}
    inconclusive = []
    fields_cache = {}

    def fields():
        if "chart0" not in fields_cache:
            fields_cache["chart0"] = chart0_fields(
                model, max_degree=scenario.max_lift_degree
            )
        return fields_cache["chart0"]

    for analysis in scenario.analyses:
        if analysis == "global-fields":
            degrees = {}
            for d in range(2, spec.max_even_degree() + 1, 2):
                degrees[str(d)] = global_field_table(spec, d)
            sections["global_fields"] = {"degrees": degrees}
        elif analysis == "lift":
            degrees = {}
            all_pairs = lift_fields(model, max_degree=scenario.max_lift_degree)
            for d in range(2, min(scenario.max_lift_degree, spec.max_even_degree()) + 1, 2):
                pairs_d = [
                    p for p in all_pairs if p.x0 and p.x0.min_degree() == d
                ]
                families = []
                for mask, direction in iter_slots(spec, d):
                    if monomial_bound(mask, direction, spec) < 0:
                        continue
                    exps = family_lift_exponents(model, mask, direction)
                    u1_exps = family_lift_exponents(
                        model, mask, direction, u1_only=True
                    )
                    families.append(
                        {
                            "slot": format_slot(mask, direction, spec.names),
                            "liftable": _exponent_summary(exps),
                            "liftable_exponents": exps,
                            "u1_only": _exponent_summary(u1_exps),
                            "u1_only_exponents": u1_exps,
                        }
                    )
                degrees[str(d)] = {
                    "dimension": len(pairs_d),
                    "families": families,
                }
            sections["lift"] = {"degrees": degrees}
        elif analysis == "kernel":
            sections["kernel"] = kernel_section(
                spec,
                fields(),
                ("filtration", 2),
                "even",
                scenario.truncation_degree,
                scenario.stabilization_window,
                inconclusive,
            )
        elif analysis == "nildominance":
            try:
                deg = nildominance_degree(
                    fields(), spec, scenario.truncation_degree,
                    scenario.stabilization_window,
                )
                sections["nildominance"] = {"degree": deg}
            except InconclusiveKernel as e:
                inconclusive.append(f"nildominance: {e}")
                sections["nildominance"] = {"degree": None}
        elif analysis == "graded-nildominance":
            try:
                deg = graded_nildominance_degree(
                    fields(), spec, scenario.truncation_degree,
                    scenario.stabilization_window,
                )
                leadings = [f.leading_part()[1] for f in fields() if f]
                desc = graded_kernel(spec, leadings, deg)
                witness = [
                    format_slot(*s, spec.names) for s in desc.free_slots()
                ]
                sections["graded_nildominance"] = {
                    "degree": deg,
                    "witness_slots": witness,
                }
            except InconclusiveKernel as e:
                inconclusive.append(f"graded-nildominance: {e}")
                sections["graded_nildominance"] = {"degree": None}
        elif analysis == "strict-nildominance":
            try:
                deg = strict_nildominance_degree(
                    fields(), spec, scenario.truncation_degree,
                    scenario.stabilization_window,
                )
                sections["strict_nildominance"] = {"degree": deg}
            except InconclusiveKernel as e:
                inconclusive.append(f"strict-nildominance: {e}")
                sections["strict_nildominance"] = {"degree": None}
        elif analysis == "splitness":
            sections["splitness"] = {"profile": splitness_profile(model)}

    return Report(
        scenario=_scenario_echo(scenario),
        sections=sections,
        inconclusive=inconclusive,
    )


def kernel_section(spec, fields, space, parity, truncation_degree, window, inconclusive):
    """Kernel description plus oracle agreement for one template."""
    template = build_template(spec, space, parity)
    system = derive_constraints(fields, template)
    desc = solve_constraints(system, allow_coupled=True)
    oracle = None
    try:
        run_trunc = common_kernel_truncated(fields, template, truncation_degree)
        oracle = {
            "truncation_degree": truncation_degree,
            "dimension": run_trunc.dimension,
            "agrees": oracle_agrees(desc, run_trunc),
        }
    except Exception as e:  # oracle failures surface, never crash the report
        inconclusive.append(f"kernel oracle: {e}")
    names = spec.names
    witnesses = {}
    for i, chain in sorted(desc.witnesses.items()):
        key = format_slot(*template.slots[i], names)
        witnesses[key] = [
            [format_derivation(system.fields[fi], names), format_slot(*out, names)]
            for fi, out in chain[:6]
        ]
    section = {
        "space": f"{space[0]}={space[1]}",
        "parity": parity,
        "free": sorted(
            "free: " + format_slot(*s, names) for s in desc.free_slots()
        ),
        "zero_count": sum(1 for s in desc.status if s == "zero"),
        "coupled": sorted(
            format_slot(*template.slots[i], names)
            for i, s in enumerate(desc.status)
            if s == "coupled"
        ),
        "pinned_dimension": len(desc.pinned_basis),
        "min_degree": desc.min_degree(),
        "complete": desc.complete,
        "witnesses": witnesses,
    }
    if oracle is not None:
        section["oracle"] = oracle
    if not desc.complete:
        inconclusive_note = (
            "kernel: coupled unknowns remain (solver closure rules insufficient)"
        )
        # coupled kernels are a structured answer, not an inconclusive one;
        # only a failed oracle cross-check marks the section inconclusive
        if oracle is not None and not oracle["agrees"]:
            inconclusive.append(inconclusive_note)
    return section


def _scenario_echo(s):
    return {
        "bundle": {
            "generators": [
                {"name": n, "twist": t}
                for n, t in zip(s.bundle.names, s.bundle.twists)
            ]
        },
        "deformation": s.deformation_text or None,
        "analyses": list(s.analyses),
        "options": {
            "truncation_degree": s.truncation_degree,
            "stabilization_window": s.stabilization_window,
            "max_lift_degree": s.max_lift_degree,
        },
    }


def render(report, fmt="markdown"):
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if fmt != "markdown":
        raise ValueError(f"unknown format {fmt!r}")
    return _render_markdown(report)


def report_from_json(text):
    return Report.from_dict(json.loads(text))


def _render_markdown(report):
    lines = ["# Analysis report", ""]
    gens = report.scenario["bundle"]["generators"]
    lines.append(
        "Bundle: "
        + ", ".join(f"{g['name']} (twist {g['twist']})" for g in gens)
    )
    deformation = report.scenario.get("deformation")
    lines.append(f"Deformation: `{deformation}`" if deformation else "Deformation: none (split model)")
    lines.append("")
    sections = report.sections
    if "global_fields" in sections:
        lines.append("## Global even fields of the split sheaf")
        lines.append("")
        for d, rows in sorted(sections["global_fields"]["degrees"].items(), key=lambda kv: int(kv[0])):
            lines.append(f"### Degree {d}")
            lines.append("")
            lines.append("| family | coefficient bound | slots | dimension |")
            lines.append("| --- | --- | --- | --- |")
            for row in rows:
                lines.append(
                    f"| {row['family']} | <= {row['bound']} | {row['slots']} | {row['dimension']} |"
                )
            lines.append("")
    if "lift" in sections:
        lines.append("## Lift conditions (leading terms of global fields)")
        lines.append("")
        for d, data in sorted(sections["lift"]["degrees"].items(), key=lambda kv: int(kv[0])):
            lines.append(
                f"### Leading degree {d} (lifted basis dimension {data['dimension']})"
            )
            lines.append("")
            lines.append("| slot | liftable | no U0 correction |")
            lines.append("| --- | --- | --- |")
            for fam in data["families"]:
                lines.append(
                    f"| {fam['slot']} | {fam['liftable'] or '-'} | {fam['u1_only'] or '-'} |"
                )
            lines.append("")
    if "kernel" in sections:
        k = sections["kernel"]
        lines.append("## Common kernel")
        lines.append("")
        lines.append(f"Space: {k['space']}, parity: {k['parity']}")
        lines.append(f"Minimal degree: {k['min_degree']}")
        lines.append(f"Zero unknowns: {k['zero_count']}; pinned dimension: {k['pinned_dimension']}")
        for f in k["free"]:
            lines.append(f"- {f}")
        for c in k["coupled"]:
            lines.append(f"- coupled: {c}")
        if "oracle" in k:
            o = k["oracle"]
            lines.append(
                f"Oracle (degree {o['truncation_degree']}): dimension {o['dimension']},"
                f" agrees: {o['agrees']}"
            )
        lines.append("")
    for key, title in (
        ("nildominance", "Nildominance degree"),
        ("graded_nildominance", "Graded nildominance degree"),
        ("strict_nildominance", "Strict nildominance degree"),
    ):
        if key in sections:
            lines.append(f"## {title}")
            lines.append("")
            lines.append(f"Degree: **{sections[key]['degree']}**")
            if sections[key].get("witness_slots"):
                lines.append(
                    "Witness slots: "
                    + ", ".join(sections[key]["witness_slots"])
                )
            lines.append("")
    if "splitness" in sections:
        lines.append("## Splitness profile")
        lines.append("")
        lines.append(f"Profile: **{sections['splitness']['profile']}**")
        lines.append("")
    if report.inconclusive:
        lines.append("## Inconclusive sections")
        lines.append("")
        for item in report.inconclusive:
            lines.append(f"- {item}")
        lines.append("")
    return "\n".join(lines)
