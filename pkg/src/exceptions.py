"""
Custom exception classes for the saturated NLS toolkit.

This module defines all custom exceptions used throughout the toolkit.
Each exception carries the process exit code the CLI reports for it.
"""

from typing import Optional, Tuple


class SaturatedNLSError(Exception):
    """Base exception for all toolkit errors."""

    exit_code = 2


class ConfigurationError(SaturatedNLSError):
    """Raised when configuration is invalid or missing."""

    exit_code = 64


class ValidationError(SaturatedNLSError):
    """Raised when input validation fails (shapes, non-finite values)."""

    exit_code = 1


class DomainError(SaturatedNLSError):
    """Raised when parameters leave the mathematical domain of an operation."""

    exit_code = 1


class ExistenceWindowError(DomainError):
    """Raised when s is outside the window 0 <= s < coupling/lambda."""

    def __init__(self, s: float, bound: float, label: str = "alpha/lambda1"):
        self.s = s
        self.bound = bound
        super().__init__(
            f"s={s:.6g} is outside the existence window 0 <= s < {label} = {bound:.6g}"
        )


class HypothesisError(DomainError):
    """Raised when the bifurcation hypothesis lambda2/lambda1 < beta/alpha fails."""

    pass


class TruncationError(DomainError):
    """Raised when a box potential does not fit inside the radial grid."""

    pass


class SolverError(SaturatedNLSError):
    """Raised when a numerical solver fails."""

    exit_code = 2


class BracketNotFoundError(SolverError):
    """Raised when no sign-changing bracket is found."""

    def __init__(self, message: str, interval: Optional[Tuple[float, float]] = None):
        self.interval = interval
        if interval is not None:
            message = f"{message} (scanned [{interval[0]:.6g}, {interval[1]:.6g}])"
        super().__init__(message)


class ConvergenceError(SolverError):
    """Raised when Newton iteration does not reach the requested tolerance."""

    def __init__(self, message: str, residual: float = float("nan"), iterations: int = 0):
        self.residual = residual
        self.iterations = iterations
        super().__init__(f"{message} (residual={residual:.3e}, iterations={iterations})")


class SingularJacobianError(SolverError):
    """Raised when the Jacobian cannot be factorized; typically near a bifurcation."""

    pass


class ExportError(SaturatedNLSError):
    """Raised when writing or reading result files fails."""

    exit_code = 74
