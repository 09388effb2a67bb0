"""Python bindings for the qalloc C++ core."""

from ._core import (
    Assembly,
    EquitableSolution,
    Hypergraph,
    KnapsackProblem,
    QallocError,
    RobustnessResult,
    closed_form_mub_robustness,
    depolarize,
    edge_prior,
    exclusivity_problem,
    fourier_basis,
    generalized_robustness,
    hypergraph,
    joint_measurability_feasible,
    lexicographic_maxmin,
    monogamy_problem,
    mub_pair_assembly,
    operator_identity_residual,
    performance_fairness,
    performance_reliability,
    product_mub_assembly,
    theorem1_allocation,
    verify_operator_identity,
)

__version__ = "0.1.0"
