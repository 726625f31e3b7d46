"""Linearization of the v-equation at the semitrivial branch."""

from src.spectrum.linearized_spectrum import (
    SpectrumSolver,
    box_potential,
    box_potential_eigen,
    check_nondegeneracy,
    eigenvalues_L,
    mu_bar,
    mu_bar_closed_form,
    mu_bar_upper_bound,
    mu_limit_saturation,
    potential_Ws,
    square_well_eigenvalue_1d,
)

__all__ = [
    "SpectrumSolver",
    "box_potential",
    "box_potential_eigen",
    "check_nondegeneracy",
    "eigenvalues_L",
    "mu_bar",
    "mu_bar_closed_form",
    "mu_bar_upper_bound",
    "mu_limit_saturation",
    "potential_Ws",
    "square_well_eigenvalue_1d",
]
