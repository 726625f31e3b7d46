"""Bifurcation points, sufficient conditions and nodal counts."""

from src.bifurcation.bifurcation_analysis import (
    BifurcationAnalyzer,
    accumulation_gap,
    check_corollary1,
    check_corollary2,
    corollary2_bound,
    count_nodes,
    default_s_grid,
    find_bifurcation_points,
    nodal_count,
    positivity_constraint,
)

__all__ = [
    "BifurcationAnalyzer",
    "accumulation_gap",
    "check_corollary1",
    "check_corollary2",
    "corollary2_bound",
    "count_nodes",
    "default_s_grid",
    "find_bifurcation_points",
    "nodal_count",
    "positivity_constraint",
]
