"""
Core model of the saturated system.

This module provides the saturation nonlinearity, the finite-volume radial
discretization with its quadrature, and the discrete residual.
"""

from src.core.cache import BoundedCache
from src.core.discretization import SPHERE_AREA, RadialOperator, radial_operator
from src.core.model import (
    decay_rate,
    intensity_Z,
    residual,
    residual_norm,
    residual_vector,
    saturated_ratio,
    saturation_energy_density,
    saturation_g,
)

__all__ = [
    "BoundedCache",
    "SPHERE_AREA",
    "RadialOperator",
    "radial_operator",
    "decay_rate",
    "intensity_Z",
    "residual",
    "residual_norm",
    "residual_vector",
    "saturated_ratio",
    "saturation_energy_density",
    "saturation_g",
]
