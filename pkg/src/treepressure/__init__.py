"""Topological pressure of weighted Markov tree-shifts on d-ary trees.

The package computes the pressure through a log-space value recursion with
optimal transition matrices, encloses the infinite-depth value in rigorous
intervals, cross-checks everything against an exact enumeration oracle at
desk scale, and sweeps the branching parameter to produce certified
monotone datasets.
"""

from .algebra import (
    Alphabet,
    AssumptionAViolation,
    AssumptionReport,
    DimensionMismatchError,
    InteractionSystem,
    ProbVector,
    SimplexError,
    StochMatrix,
    check_assumption_A,
    d_V,
    d_v,
    d_vV,
    kl_columns,
    require_assumption_A,
)
from .analysis import (
    BracketReport,
    BracketViolationError,
    LimitCheck,
    LimitReport,
    SweepResult,
    SweepRow,
    SweepSpec,
    bracket_report,
    emit_dataset,
    parse_dataset,
    sweep,
    verify_limits,
)
from .oracle import (
    DP_GUARD,
    ENUMERATION_GUARD,
    InadmissibleBlockError,
    OmegaCounts,
    OracleGuardError,
    PatternClassKey,
    PatternPair,
    TreeBlock,
    TreeSupport,
    admissible_blocks,
    block_weight,
    class_partition,
    log_partition_function,
    omega_counts,
    partition_function,
    partition_function_enumerated,
    pattern_stats,
    pressure_sequence,
    stirling_residual,
)
from .pressure import (
    CertificateCapError,
    LambdaSequence,
    PowerIterationError,
    PressureCertificate,
    ReachabilityData,
    ReachabilityError,
    SupportViolationError,
    alpha_beta_gamma,
    finite_pressure,
    lambda_sequence,
    lambda_step,
    objective_Fk,
    parry_transition,
    pressure_certificate,
    r_E,
    reachability,
    spectral_radius,
    tail_coefficient,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "ProbVector",
    "StochMatrix",
    "InteractionSystem",
    "AssumptionReport",
    "check_assumption_A",
    "require_assumption_A",
    "d_v",
    "d_V",
    "d_vV",
    "kl_columns",
    "DimensionMismatchError",
    "SimplexError",
    "AssumptionAViolation",
    "LambdaSequence",
    "PressureCertificate",
    "ReachabilityData",
    "alpha_beta_gamma",
    "r_E",
    "spectral_radius",
    "reachability",
    "lambda_step",
    "lambda_sequence",
    "finite_pressure",
    "objective_Fk",
    "pressure_certificate",
    "parry_transition",
    "tail_coefficient",
    "SupportViolationError",
    "PowerIterationError",
    "CertificateCapError",
    "ReachabilityError",
    "TreeSupport",
    "TreeBlock",
    "PatternPair",
    "PatternClassKey",
    "OmegaCounts",
    "admissible_blocks",
    "block_weight",
    "partition_function",
    "partition_function_enumerated",
    "log_partition_function",
    "pressure_sequence",
    "pattern_stats",
    "class_partition",
    "omega_counts",
    "stirling_residual",
    "OracleGuardError",
    "InadmissibleBlockError",
    "ENUMERATION_GUARD",
    "DP_GUARD",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "LimitCheck",
    "LimitReport",
    "BracketReport",
    "BracketViolationError",
    "sweep",
    "verify_limits",
    "bracket_report",
    "emit_dataset",
    "parse_dataset",
]
