"""Scalar ground states u_s and v_s of the semitrivial branches."""

from src.ground_state.scalar_ground_state import (
    GroundStateSolver,
    ground_state_1d,
    ground_state_radial,
    peak_amplitude_1d,
    polish_profile,
    scaled_ground_state_s0,
    shooting_amplitude,
)

__all__ = [
    "GroundStateSolver",
    "ground_state_1d",
    "ground_state_radial",
    "peak_amplitude_1d",
    "polish_profile",
    "scaled_ground_state_s0",
    "shooting_amplitude",
]
