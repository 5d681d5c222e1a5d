"""Exact symbolic engine for even vector fields on split supermanifolds
over the projective line: chart transport, deformation lifting, common
bracket kernels and the induced nildominance degrees."""

from .chart import (
    BundleSpec,
    ChartExpr,
    U0,
    U1,
    global_basis,
    h1_basis,
    is_global,
    monomial_bound,
    split_cochain,
    transform,
)
from .deformation import (
    DeformedModel,
    GlobalFieldPair,
    chart0_fields,
    family_lift_exponents,
    glue_check,
    lift_fields,
    pure_field_list,
    splitness_profile,
)
from .derivations import (
    BASE,
    SuperAutomorphism,
    SuperDerivation,
    bracket,
    exp_automorphism,
    log_automorphism,
)
from .expr import (
    ExprError,
    format_derivation,
    format_function,
    format_slot,
    parse_derivation,
    parse_function,
)
from .grassmann import SuperFunction
from .kernel import (
    InconclusiveKernel,
    KernelDescription,
    SolverIncomplete,
    build_template,
    common_kernel_truncated,
    derive_constraints,
    graded_kernel,
    graded_nildominance_degree,
    kernel_min_degree,
    nildominance_degree,
    solve_constraints,
    strict_nildominance_degree,
)
from .laurent import LaurentPoly
from .report import Report, Scenario, parse_scenario, render, run

__version__ = "0.1.0"
