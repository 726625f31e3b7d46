"""
Energy functional I_s, Nehari functional H and the fibering map.

    I_s(u, v) = ½(‖u‖²_{λ₁} + ‖v‖²_{λ₂}) - (1/2s²)∫g(sZ)
    H(u, v)   = ‖u‖²_{λ₁} + ‖v‖²_{λ₂} - ∫Z²/(1 + sZ)

All integrals use the finite-volume quadrature of the radial grid, so H
vanishes to rounding at every discrete solution.
"""

import math
from typing import Iterable, List, Optional, Sequence

import numpy as np
from scipy import optimize

from src.config import EnergyConfig
from src.core.cache import BoundedCache
from src.core.discretization import radial_operator
from src.core.model import intensity_values, saturation_energy_density
from src.exceptions import DomainError, ExistenceWindowError
from src.ground_state import GroundStateSolver
from src.models import (
    Branch,
    EnergyCandidate,
    EnergyReport,
    FiberingResult,
    Params,
    RadialGrid,
    RadialProfile,
    SemitrivialLevels,
    StatePair,
)


def _norms_squared(state: StatePair, params: Params) -> float:
    op = radial_operator(state.grid, params.n)
    return op.lambda_norm_squared(state.u.values, params.lambda1) + op.lambda_norm_squared(
        state.v.values, params.lambda2
    )


def _intensity(state: StatePair, params: Params) -> np.ndarray:
    return intensity_values(state.u.values, state.v.values, params.alpha, params.beta)


def energy_Is(state: StatePair, s: float, params: Params) -> float:
    """
    I_s(u, v); at s = 0 the saturation term is ¼∫Z².

    Args:
        state: State pair
        s: Saturation parameter
        params: Physical constants (params.s is ignored)

    Returns:
        Energy value
    """
    op = radial_operator(state.grid, params.n)
    z = _intensity(state, params)
    return 0.5 * _norms_squared(state, params) - op.integrate(saturation_energy_density(z, s))


def nehari_H(state: StatePair, s: float, params: Params) -> float:
    """H(u, v) = I_s'(u, v)[(u, v)]."""
    op = radial_operator(state.grid, params.n)
    z = _intensity(state, params)
    return _norms_squared(state, params) - op.integrate(z * z / (1.0 + s * z))


def fibering_maximize(state: StatePair, s: float, params: Params) -> FiberingResult:
    """
    Maximize β(r) = I_s(√r·u, √r·v) over r > 0.

    β'(r) = ½(N - G(r)) with N = ‖u‖²_{λ₁} + ‖v‖²_{λ₂} and
    G(r) = r∫Z²/(1 + rsZ), which is increasing and concave with limit ∫Z/s.
    β is bounded exactly when that limit exceeds N (always for s = 0).
    Newton from r = 0 approaches the root monotonically from below.

    Raises:
        DomainError: If the state is zero
    """
    op = radial_operator(state.grid, params.n)
    z = _intensity(state, params)
    z2 = op.integrate(z * z)
    if z2 == 0.0:
        raise DomainError("fibering map of the zero state is not defined")
    norm_sq = _norms_squared(state, params)
    if s > 0.0 and op.integrate(z) / s <= norm_sq:
        return FiberingResult(bounded=False, r_star=None, sup_value=math.inf)

    def excess(r: float) -> float:
        return r * op.integrate(z * z / (1.0 + r * s * z)) - norm_sq

    r = 0.0
    converged = False
    for _ in range(200):
        slope = op.integrate(z * z / (1.0 + r * s * z) ** 2)
        step = -excess(r) / slope
        r += step
        if abs(step) <= 1e-14 * r:
            converged = True
            break
    if not converged:
        hi = max(r, norm_sq / z2)
        while excess(hi) < 0.0:
            hi *= 2.0
        r = optimize.brentq(excess, 0.0, hi, xtol=1e-300, rtol=4.0 * np.finfo(float).eps)

    scaled = state.scaled(math.sqrt(r))
    return FiberingResult(bounded=True, r_star=r, sup_value=energy_Is(scaled, s, params))


def symmetric_family_states(us: RadialProfile, thetas: Iterable[float]) -> List[StatePair]:
    """(cos θ·u_s, sin θ·u_s) for each θ."""
    return [StatePair(us.scaled(math.cos(t)), us.scaled(math.sin(t))) for t in thetas]


def semitrivial_levels(
    params: Params, grid: RadialGrid, solver: Optional[GroundStateSolver] = None
) -> SemitrivialLevels:
    """
    I_s(u_s, 0) and I_s(0, v_s) where they exist.

    Raises:
        ExistenceWindowError: If s >= max{α/λ₁, β/λ₂}
    """
    solver = solver or GroundStateSolver()
    s = params.s
    level_u: Optional[float] = None
    level_v: Optional[float] = None
    if s < params.s_star_u:
        us = solver.discrete(params.scalar_u(), grid)
        level_u = energy_Is(StatePair.semitrivial(us), s, params)
    if s < params.s_star_v:
        vs = solver.discrete(params.scalar_v(), grid)
        level_v = energy_Is(StatePair(RadialProfile.zeros(grid), vs), s, params)
    available = [level for level in (level_u, level_v) if level is not None]
    if not available:
        raise ExistenceWindowError(
            s, max(params.s_star_u, params.s_star_v), "max(alpha/lambda1, beta/lambda2)"
        )
    return SemitrivialLevels(level_u=level_u, level_v=level_v, c_s_star=min(available))


class EnergyAnalyzer:
    """
    Compares branch energies with the semitrivial level c_s*.

    For asymmetric parameters no fully nontrivial solution should lie below
    c_s*; for symmetric parameters the report records the spread of I_s over
    the family (cos θ·u_s, sin θ·u_s) instead.
    """

    COMPONENT = "EnergyAnalyzer"

    def __init__(
        self,
        ground_state: Optional[GroundStateSolver] = None,
        config: Optional[EnergyConfig] = None,
        logger=None,
    ):
        """
        Initialize energy analyzer.

        Args:
            ground_state: Solver providing u_s and v_s
            config: Energy check settings
            logger: Optional LoggingManager instance
        """
        self.ground_state = ground_state or GroundStateSolver(logger=logger)
        self.config = config or EnergyConfig()
        self.logger = logger
        self._levels: BoundedCache[SemitrivialLevels] = BoundedCache(self.config.cache_size)

    def levels(self, params: Params, grid: RadialGrid) -> SemitrivialLevels:
        key = (params, grid)
        if key not in self._levels:
            self._levels[key] = semitrivial_levels(params, grid, self.ground_state)
        return self._levels[key]

    def theta_energy_spread(self, params: Params, grid: RadialGrid) -> float:
        """max - min of I_s over the symmetric family."""
        us = self.ground_state.discrete(params.scalar_u(), grid)
        thetas = np.linspace(0.0, 0.5 * math.pi, self.config.theta_count)
        energies = [energy_Is(st, params.s, params) for st in symmetric_family_states(us, thetas)]
        return float(max(energies) - min(energies))

    def verify(
        self,
        branches: Sequence[Branch],
        params: Params,
        grid: RadialGrid,
        tol: Optional[float] = None,
    ) -> EnergyReport:
        """
        Check every fully nontrivial branch point against c_s* at its own s.

        Args:
            branches: Computed branches
            params: Parameters; params.s is the reference s of the report
            grid: Radial grid of the branches
            tol: Absolute tolerance; None uses tolerance_factor·|c_s*| per point

        Returns:
            EnergyReport listing candidates and violations
        """
        reference = self.levels(params, grid)
        report = EnergyReport(
            c_s_star=reference.c_s_star,
            tolerance=(
                tol if tol is not None else self.config.tolerance_factor * abs(reference.c_s_star)
            ),
            symmetric_case=params.is_symmetric,
            level_u=reference.level_u,
            level_v=reference.level_v,
        )

        for branch in branches:
            for point in branch.points:
                if not self._fully_nontrivial(point.state):
                    continue
                level = self.levels(params.with_s(point.s), grid).c_s_star
                point_tol = tol if tol is not None else self.config.tolerance_factor * abs(level)
                candidate = EnergyCandidate(
                    source=f"k{branch.k}:{branch.direction}:{point.step}",
                    s=point.s,
                    energy=point.energy,
                    c_s_star=level,
                    margin=point.energy - level,
                )
                report.candidates.append(candidate)
                if not report.symmetric_case and candidate.margin < -point_tol:
                    report.violations.append(candidate)

        if report.symmetric_case:
            report.theta_energy_spread = self.theta_energy_spread(params, grid)

        if self.logger:
            level = "warning" if report.violations else "info"
            getattr(self.logger, level)(
                component=self.COMPONENT,
                operation="verify",
                message=f"Checked {len(report.candidates)} candidates, "
                f"{len(report.violations)} below c_s*",
                metadata={
                    "c_s_star": report.c_s_star,
                    "symmetric_case": report.symmetric_case,
                    "theta_energy_spread": report.theta_energy_spread,
                },
            )
        return report

    @staticmethod
    def _fully_nontrivial(state: StatePair) -> bool:
        return state.u.sup_norm() > 0.0 and state.v.sup_norm() > 0.0


def verify_semitrivial_groundstate(
    branches: Sequence[Branch],
    params: Params,
    tol: Optional[float] = None,
    grid: Optional[RadialGrid] = None,
    analyzer: Optional[EnergyAnalyzer] = None,
) -> EnergyReport:
    """Energy check of all branch points; see EnergyAnalyzer.verify."""
    if grid is None:
        if not branches or not branches[0].points:
            grid = RadialGrid.for_params(params, num_points=4001)
        else:
            grid = branches[0].points[0].state.grid
    analyzer = analyzer or EnergyAnalyzer()
    return analyzer.verify(branches, params, grid, tol=tol)
