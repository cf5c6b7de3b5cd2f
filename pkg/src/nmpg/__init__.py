"""Nonmonotone proximal gradient solver and benchmark harness for f + phi."""

from .core import (
    BarzilaiBorweinSafeguarded,
    CompositeProblem,
    ConstantGamma,
    ExtReal,
    GlobalLipschitz,
    IterationRecord,
    KLHypothesis,
    LocalLipschitz,
    MaxReference,
    MeanReference,
    Optimum,
    PreviousAccepted,
    RunResult,
    RunStatus,
    SmoothModel,
    NonsmoothTerm,
    SolverParams,
    Trace,
    psi_eval,
)
from .prox import (
    BoxIndicator,
    L0Term,
    L1Term,
    LHalfTerm,
    SparsitySetIndicator,
    ZeroTerm,
    prox_box,
    prox_l0,
    prox_l1,
    prox_lhalf,
    prox_sparsity,
)
from .problems import (
    ProblemSpec,
    build_problem,
    cached_reference_optimum,
    make_exp_fit_l1,
    make_lasso_general,
    make_lasso_identity,
    make_quartic_regression_l0,
    make_quartic_scalar,
    make_sparsity_projected_quadratic,
    reference_optimum,
)
from .solver import (
    BacktrackLimitExceeded,
    NumericalFailure,
    SolverState,
    StepOutcome,
    accept_step,
    backtrack,
    compute_m,
    max_rule_reference,
    residual,
    solve,
    subproblem_step,
    update_reference,
)

__all__ = [
    "BacktrackLimitExceeded",
    "BarzilaiBorweinSafeguarded",
    "BoxIndicator",
    "CompositeProblem",
    "ConstantGamma",
    "ExtReal",
    "GlobalLipschitz",
    "IterationRecord",
    "KLHypothesis",
    "L0Term",
    "L1Term",
    "LHalfTerm",
    "LocalLipschitz",
    "MaxReference",
    "MeanReference",
    "NonsmoothTerm",
    "NumericalFailure",
    "Optimum",
    "PreviousAccepted",
    "ProblemSpec",
    "RunResult",
    "RunStatus",
    "SmoothModel",
    "SolverParams",
    "SolverState",
    "SparsitySetIndicator",
    "StepOutcome",
    "Trace",
    "ZeroTerm",
    "accept_step",
    "backtrack",
    "build_problem",
    "cached_reference_optimum",
    "compute_m",
    "make_exp_fit_l1",
    "make_lasso_general",
    "make_lasso_identity",
    "make_quartic_regression_l0",
    "make_quartic_scalar",
    "make_sparsity_projected_quadratic",
    "max_rule_reference",
    "prox_box",
    "prox_l0",
    "prox_l1",
    "prox_lhalf",
    "prox_sparsity",
    "psi_eval",
    "reference_optimum",
    "residual",
    "solve",
    "subproblem_step",
    "update_reference",
]

__version__ = "0.1.0"
