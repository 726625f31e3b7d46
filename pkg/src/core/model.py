"""
Saturation nonlinearity and the discretized residual of the coupled system

    -Δu + λ₁u = αuZ/(1 + sZ),   -Δv + λ₂v = βvZ/(1 + sZ),   Z = αu² + βv².
"""

import math
from typing import Optional, Tuple, Union

import numpy as np

from src.core.discretization import radial_operator
from src.exceptions import DomainError, ValidationError
from src.models import Params, RadialGrid, RadialProfile, StatePair

ArrayLike = Union[float, np.ndarray]

# below this argument g(z) is evaluated by its Taylor series
SERIES_SWITCH = 1e-4


def saturation_g(z: ArrayLike) -> ArrayLike:
    """
    g(z) = z - ln(1 + z) for z >= 0.

    Args:
        z: Nonnegative scalar or array

    Returns:
        g(z) with the same shape as z

    Raises:
        DomainError: If any z is negative
    """
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("saturation_g requires z >= 0")
    series = arr * arr * (0.5 - arr * (1.0 / 3.0 - arr * (0.25 - 0.2 * arr)))
    safe = np.where(arr < SERIES_SWITCH, 1.0, arr)
    closed = safe - np.log1p(safe)
    out = np.where(arr < SERIES_SWITCH, series, closed)
    if np.ndim(z) == 0:
        return float(out)
    return out


def saturation_energy_density(z: np.ndarray, s: float) -> np.ndarray:
    """
    g(sZ)/(2s²), with the s = 0 limit Z²/4.

    Args:
        z: Intensity values Z >= 0
        s: Saturation parameter

    Returns:
        Pointwise energy density of the nonlinearity
    """
    z = np.asarray(z, dtype=float)
    if s == 0.0:
        return 0.25 * z * z
    return np.asarray(saturation_g(s * z)) / (2.0 * s * s)


def saturated_ratio(z: np.ndarray, s: float) -> np.ndarray:
    """Z/(1 + sZ)."""
    return z / (1.0 + s * z)


def intensity_Z(state: StatePair, params: Params) -> RadialProfile:
    """
    Z = αu² + βv² pointwise.

    Args:
        state: State pair (u, v)
        params: Parameters providing α and β

    Returns:
        Nonnegative profile Z
    """
    z = intensity_values(state.u.values, state.v.values, params.alpha, params.beta)
    return RadialProfile(state.grid, z)


def intensity_values(u: np.ndarray, v: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    return alpha * u * u + beta * v * v


def residual_vector(
    x: np.ndarray, grid: RadialGrid, params: Params, s: Optional[float] = None
) -> np.ndarray:
    """
    Stacked discrete residual [R_u, R_v] of the state vector x = [u, v].

    The last node of each component holds the Dirichlet residual u(r_max).
    """
    s = params.s if s is None else s
    op = radial_operator(grid, params.n)
    m = grid.num_points
    u = x[:m]
    v = x[m:]
    z = intensity_values(u, v, params.alpha, params.beta)
    q = saturated_ratio(z, s)
    ru = op.minus_laplacian(u) + params.lambda1 * u - params.alpha * u * q
    rv = op.minus_laplacian(v) + params.lambda2 * v - params.beta * v * q
    ru[-1] = u[-1]
    rv[-1] = v[-1]
    return np.concatenate([ru, rv])


def residual(state: StatePair, params: Params) -> Tuple[RadialProfile, RadialProfile]:
    """
    Discretized left-minus-right sides of both equations.

    Args:
        state: State pair (u, v)
        params: Parameters including s

    Returns:
        (R_u, R_v) as profiles on the state's grid
    """
    r = residual_vector(state.as_vector(), state.grid, params)
    m = state.grid.num_points
    return RadialProfile(state.grid, r[:m]), RadialProfile(state.grid, r[m:])


def residual_norm(state: StatePair, params: Params) -> float:
    """Sup-norm of the discrete residual."""
    return float(np.max(np.abs(residual_vector(state.as_vector(), state.grid, params))))


def residual_floor(grid: RadialGrid, scale: float, lam: float) -> float:
    """Rounding level of the discrete residual for values of size `scale`."""
    return 4.0 * float(np.finfo(float).eps) * scale * (4.0 / grid.h**2 + lam)


def scalar_nonlinearity(u: np.ndarray, coupling: float, s: float) -> np.ndarray:
    """f(u) = c²u³/(1 + s·c·u²) for the scalar problem with coupling c."""
    cu2 = coupling * u * u
    return coupling * u * cu2 / (1.0 + s * cu2)


def scalar_nonlinearity_derivative(u: np.ndarray, coupling: float, s: float) -> np.ndarray:
    """f'(u) = (3c²u² + s·c³u⁴)/(1 + s·c·u²)²."""
    cu2 = coupling * u * u
    return (3.0 * coupling * cu2 + s * coupling * cu2 * cu2) / (1.0 + s * cu2) ** 2


def decay_rate(profile: RadialProfile, n: int, floor: float = 1e-10) -> float:
    """
    Estimate the exponential decay rate c in u(r) ~ r^{-(n-1)/2} e^{-cr}.

    Fits a line to log(|u|·r^{(n-1)/2}) over the tail where
    floor·max|u| < |u| < 1e-2·max|u|, away from the Dirichlet end.

    Args:
        profile: Decaying profile
        n: Dimension
        floor: Relative lower cut-off of the fit window

    Returns:
        Estimated decay rate (positive for decaying profiles)

    Raises:
        ValidationError: If the tail window holds fewer than 5 nodes
    """
    values = np.abs(profile.values)
    peak = float(np.max(values))
    if peak == 0.0:
        raise ValidationError("cannot estimate the decay rate of a zero profile")
    r = profile.grid.nodes
    # beyond the peak region only
    start = int(np.argmax(values < 1e-2 * peak))
    window = np.arange(start, len(values))
    window = window[
        (values[window] > floor * peak) & (r[window] > 0) & (r[window] < 0.8 * r[-1])
    ]
    if len(window) < 5:
        raise ValidationError("tail window too short to estimate a decay rate")
    logs = np.log(values[window]) + 0.5 * (n - 1) * np.log(r[window])
    slope = np.polyfit(r[window], logs, 1)[0]
    return float(-slope)


def saturation_bound(s: float) -> float:
    """Upper bound 1/s of Z/(1 + sZ); infinite for s = 0."""
    return math.inf if s == 0.0 else 1.0 / s
