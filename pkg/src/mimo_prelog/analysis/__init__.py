"""Index sets, Jacobian assembly and closed-form pre-log bounds."""

from .bounds import (
    PrelogReport,
    best_T,
    chi_low,
    chi_star,
    clamp,
    eta,
    prelog_report,
    chi_star_ceiling,
    min_R_for_T,
    t_opt,
    zheng_tse,
)
from .index_sets import (
    IndexSelection,
    Lemma5Sets,
    SelectionReport,
    build_D,
    build_I,
    build_P,
    build_selection,
    lemma5_sets,
    pilot_fill_order,
    row_parameters,
    selection_matrix,
    sweep_grid,
    theta_R,
    validate_selection,
)
from .jacobian import (
    BezoutExponent,
    GenericityResult,
    JacobianAssembly,
    JacobianLayout,
    LogDet,
    WitnessResult,
    assemble,
    assemble_batch,
    bezout_exponent,
    build_layout,
    complementary_minors,
    constant_fading_Z,
    genericity_trial,
    is_nonsingular,
    log_abs_det,
    mapping_phi,
    singular_value_ratio,
    witness,
)

__all__ = [
    "BezoutExponent",
    "GenericityResult",
    "IndexSelection",
    "JacobianAssembly",
    "JacobianLayout",
    "Lemma5Sets",
    "LogDet",
    "PrelogReport",
    "SelectionReport",
    "WitnessResult",
    "assemble",
    "assemble_batch",
    "best_T",
    "bezout_exponent",
    "build_D",
    "build_I",
    "build_P",
    "build_layout",
    "build_selection",
    "chi_low",
    "chi_star",
    "clamp",
    "complementary_minors",
    "constant_fading_Z",
    "eta",
    "genericity_trial",
    "is_nonsingular",
    "lemma5_sets",
    "log_abs_det",
    "mapping_phi",
    "pilot_fill_order",
    "prelog_report",
    "chi_star_ceiling",
    "min_R_for_T",
    "row_parameters",
    "selection_matrix",
    "singular_value_ratio",
    "sweep_grid",
    "t_opt",
    "theta_R",
    "validate_selection",
    "witness",
    "zheng_tse",
]
