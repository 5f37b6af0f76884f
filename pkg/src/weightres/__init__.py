"""Weighted and logarithmic resolution of singularities by exact computation."""
from .algebra import (
    Ideal,
    JetBudget,
    Polynomial,
    Role,
    SubstitutionMap,
    VariableContext,
    exact_divide_by_monomial,
    solve_parameter_to_coordinate,
    substitute,
    translate_to_origin,
)
from .blowup import (
    controlled_transform,
    d_transform_with_monomial_tracking,
    monomial_hull_blowup,
    strict_transform,
    weighted_blowup_charts,
)
from .centers import (
    Invariant,
    QRegularCenter,
    admissibility_check,
    integrality_check,
    invariant_compare,
    log_weighted_center_at_origin,
    weighted_center_at_origin,
)
from .diffcalc import (
    DerivationBasis,
    coefficient_ideal,
    derivative_ideal,
    homogenized_sum,
    log_order_at_origin,
    maximal_contact,
    monomial_hull,
    order_at_origin,
    restrict_to_contact,
)
from .driver import (
    PointFinderConfig,
    discover_points,
    log_order_reduction,
    principalize_log_weighted,
    principalize_weighted,
    resolve_nonembedded,
)
from .errors import WeightresError
from .io import emit_dot, emit_trace_json, parse_ideal_file
from .kernels import BACKEND
from .monomial import MonomialIdeal, kummer_root, monomial_integral_closure, newton_membership, saturated_power

__version__ = "0.1.0"
