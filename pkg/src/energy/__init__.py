"""Energy functional, Nehari manifold and semitrivial levels."""

from src.energy.energy_functional import (
    EnergyAnalyzer,
    energy_Is,
    fibering_maximize,
    nehari_H,
    semitrivial_levels,
    symmetric_family_states,
    verify_semitrivial_groundstate,
)

__all__ = [
    "EnergyAnalyzer",
    "energy_Is",
    "fibering_maximize",
    "nehari_H",
    "semitrivial_levels",
    "symmetric_family_states",
    "verify_semitrivial_groundstate",
]
