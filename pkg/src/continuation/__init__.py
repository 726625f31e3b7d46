"""Newton solves and branch continuation of the coupled system."""

from src.continuation.branch_continuation import (
    BranchContinuer,
    NewtonOutcome,
    continue_branch,
    effective_tolerance,
    jacobian,
    jacobian_matrix,
    newton_solve,
    residual_s_derivative,
    solution_norms,
)

__all__ = [
    "BranchContinuer",
    "NewtonOutcome",
    "continue_branch",
    "effective_tolerance",
    "jacobian",
    "jacobian_matrix",
    "newton_solve",
    "residual_s_derivative",
    "solution_norms",
]
