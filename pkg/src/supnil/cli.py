"""Command line interface.

    supnil analyze <scenario.json> [--report out] [--format markdown|json]
                   [--truncation-degree N] [--max-degree N]
    supnil tables <scenario.json> --degree d
    supnil kernel <scenario.json> --space "q=1"|"filtration>=2" --parity even|all

Exit codes: 0 complete, 2 inconclusive sections present, 1 error.
All computation is exact and deterministic; there are no seed knobs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .deformation import chart0_fields
from .report import (
    Scenario,
    ScenarioError,
    global_field_table,
    kernel_section,
    parse_scenario,
    render,
    run,
)


def _load_scenario(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        raise SystemExit(1)
    try:
        return parse_scenario(text)
    except ScenarioError as e:
        for msg in e.errors:
            print(f"scenario error: {msg}", file=sys.stderr)
        raise SystemExit(1)


def _cmd_analyze(args):
    scenario = _load_scenario(args.scenario)
    if args.truncation_degree is not None:
        scenario.truncation_degree = args.truncation_degree
    if args.max_degree is not None:
        scenario.max_lift_degree = args.max_degree
    report = run(scenario)
    text = render(report, args.format)
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 2 if report.inconclusive else 0


def _cmd_tables(args):
    scenario = _load_scenario(args.scenario)
    spec = scenario.bundle
    rows = global_field_table(spec, args.degree)
    print(f"degree {args.degree}")
    for row in rows:
        print(
            f"  {row['family']}  <= {row['bound']}"
            f"  (slots {row['slots']}, dimension {row['dimension']})"
        )
    return 0


def _parse_space(text):
    text = text.strip().replace(" ", "")
    if text.startswith("q="):
        return ("graded", int(text[2:]))
    if text.startswith("filtration>="):
        return ("filtration", int(text[len("filtration>="):]))
    raise SystemExit(f"error: unknown kernel space {text!r}")


def _cmd_kernel(args):
    scenario = _load_scenario(args.scenario)
    spec = scenario.bundle
    model = scenario.model()
    fields = chart0_fields(model, max_degree=scenario.max_lift_degree)
    inconclusive = []
    section = kernel_section(
        spec,
        fields,
        _parse_space(args.space),
        args.parity,
        scenario.truncation_degree,
        scenario.stabilization_window,
        inconclusive,
    )
    print(f"space: {section['space']}  parity: {section['parity']}")
    print(f"minimal degree: {section['min_degree']}")
    for f in section["free"]:
        print(f)
    for c in section["coupled"]:
        print(f"coupled: {c}")
    print(f"zero unknowns: {section['zero_count']}")
    print(f"pinned dimension: {section['pinned_dimension']}")
    if "oracle" in section:
        o = section["oracle"]
        print(
            f"oracle degree {o['truncation_degree']}: dimension {o['dimension']},"
            f" agrees: {o['agrees']}"
        )
    for item in inconclusive:
        print(f"inconclusive: {item}")
    return 2 if inconclusive else 0


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="supnil",
        description=(
            "Exact analysis of even vector fields, deformations and common "
            "bracket kernels for split vector bundles on the projective line."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="run the requested analyses of a scenario")
    p.add_argument("scenario")
    p.add_argument("--report", help="write the report to this path")
    p.add_argument("--format", choices=("markdown", "json"), default="markdown")
    p.add_argument("--truncation-degree", type=int, default=None)
    p.add_argument("--max-degree", type=int, default=None)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("tables", help="global field families of one degree")
    p.add_argument("scenario")
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(func=_cmd_tables)

    p = sub.add_parser("kernel", help="common kernel on one template")
    p.add_argument("scenario")
    p.add_argument("--space", required=True, help='"q=N" or "filtration>=N"')
    p.add_argument("--parity", choices=("even", "all"), default="even")
    p.set_defaults(func=_cmd_kernel)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
