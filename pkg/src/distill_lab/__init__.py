"""Numerical laboratory for Werner-state distillability experiments."""

from .bundles import Bundle, read_bundle, write_bundle
from .distill import (
    RankTwoFactors,
    SubsystemSet,
    check_rank2_inequality,
    f_bilinear,
    m_n_permutation,
    merge_operator,
    pqr,
    q_functional,
    q_functional_unnormalized,
    random_rank_two,
    sandwich_evaluator,
)
from .errors import (
    DimensionLimitError,
    DistillLabError,
    ShapeError,
    SymmetryError,
)
from .iterate import IterateState, certify_iterate, e_step, initial_iterate
from .linalg import (
    ComplexMatrix,
    MultipartiteState,
    SubsystemPermutation,
    kron,
    min_eigenvalue_hermitian,
    partial_trace,
    partial_transpose,
    permutation_matrix,
    permute_subsystems,
    svd,
)
from .multivar import (
    RankOnePoint,
    f_real,
    g_value,
    grad_g,
    hessian_g,
    hessian_spectrum_sweep,
    nonconvexity_demo,
)
from .optimize import (
    SearchConfig,
    SearchReport,
    grad_q,
    minimize_q,
    witness_tensor,
)
from .schmidt import (
    SchmidtData,
    max_overlap_oracle,
    max_overlap_sr_k,
    psi_iso,
    psi_iso_general,
    psi_iso_inverse,
    schmidt_decompose,
)
from .states import (
    WernerParams,
    beta_bound,
    ge_operator,
    max_entangled_state,
    swap_operator,
    thresholds,
    werner_partial_transpose,
    werner_state,
)
from .verify import CheckResult, rank2_slack_sampling, run_suite

__version__ = "0.1.0"

__all__ = [
    "Bundle",
    "CheckResult",
    "ComplexMatrix",
    "DimensionLimitError",
    "DistillLabError",
    "IterateState",
    "MultipartiteState",
    "RankOnePoint",
    "RankTwoFactors",
    "SchmidtData",
    "SearchConfig",
    "SearchReport",
    "ShapeError",
    "SubsystemPermutation",
    "SubsystemSet",
    "SymmetryError",
    "WernerParams",
    "beta_bound",
    "certify_iterate",
    "check_rank2_inequality",
    "e_step",
    "f_bilinear",
    "f_real",
    "g_value",
    "ge_operator",
    "grad_g",
    "grad_q",
    "hessian_g",
    "hessian_spectrum_sweep",
    "initial_iterate",
    "kron",
    "m_n_permutation",
    "max_entangled_state",
    "max_overlap_oracle",
    "max_overlap_sr_k",
    "merge_operator",
    "min_eigenvalue_hermitian",
    "minimize_q",
    "nonconvexity_demo",
    "partial_trace",
    "partial_transpose",
    "permutation_matrix",
    "permute_subsystems",
    "pqr",
    "psi_iso",
    "psi_iso_general",
    "psi_iso_inverse",
    "q_functional",
    "q_functional_unnormalized",
    "random_rank_two",
    "rank2_slack_sampling",
    "read_bundle",
    "run_suite",
    "sandwich_evaluator",
    "schmidt_decompose",
    "svd",
    "swap_operator",
    "thresholds",
    "werner_partial_transpose",
    "werner_state",
    "write_bundle",
]
