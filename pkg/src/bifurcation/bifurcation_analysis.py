"""
Bifurcation points on the semitrivial branch (u_s, 0).

A fully nontrivial branch emanates from (u_s, 0) wherever μ_k(s) = 1, with
v proportional to the k-th eigenfunction of L(s). This module scans the
eigenvalue curves for those crossings and evaluates the closed-form
sufficient conditions and the positivity constraint.
"""

import math
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import optimize

from src.config import BifurcationConfig
from src.exceptions import DomainError, HypothesisError
from src.models import (
    BifurcationPoint,
    BifurcationSearch,
    EigenCurves,
    NodalCount,
    Params,
    PositivityKind,
    PositivityVerdict,
    RadialGrid,
    RadialProfile,
)
from src.spectrum import SpectrumSolver


def nodal_count(profile: RadialProfile, tail_threshold: float = 1e-6) -> NodalCount:
    """
    Strict sign changes of a profile, ignoring its small tail.

    Only nodes with |value| > tail_threshold·max|value| are compared, so
    rounding noise in the exponentially small tail does not add zeros.

    Args:
        profile: Profile to inspect
        tail_threshold: Relative magnitude below which values are ignored

    Returns:
        NodalCount; effectively_zero is set for an identically small profile
    """
    values = profile.values
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return NodalCount(count=0, effectively_zero=True)
    significant = values[np.abs(values) > tail_threshold * peak]
    signs = np.sign(significant)
    return NodalCount(count=int(np.count_nonzero(signs[1:] != signs[:-1])))


def count_nodes(profile: RadialProfile, tail_threshold: float = 1e-6) -> int:
    """Number of zeros of a radial profile (see nodal_count)."""
    return nodal_count(profile, tail_threshold).count


def check_corollary1(params: Params) -> bool:
    """
    λ₂/λ₁ < β/α < (λ₂/λ₁)^{(4-n)/4}: at least one bifurcation point in n = 2, 3.

    Raises:
        DomainError: If n is not 2 or 3
    """
    if params.n not in (2, 3):
        raise DomainError(f"check_corollary1 needs n = 2 or 3, got n = {params.n}")
    ratio = params.lambda_ratio
    return ratio < params.coupling_ratio < ratio ** ((4 - params.n) / 4.0)


def corollary2_bound(params: Params, k0: int) -> float:
    """½(ω + 2k₀)(ω + 2k₀ + 1) with ω = √(λ₂/λ₁)."""
    omega = params.omega
    return 0.5 * (omega + 2 * k0) * (omega + 2 * k0 + 1)


def check_corollary2(params: Params, k0: int) -> bool:
    """
    λ₂/λ₁ < β/α < ½(ω + 2k₀)(ω + 2k₀ + 1): a bifurcation point s_{k₀} in n = 1.

    Raises:
        DomainError: If n != 1 or k0 < 0
    """
    if params.n != 1:
        raise DomainError(f"check_corollary2 needs n = 1, got n = {params.n}")
    if k0 < 0:
        raise DomainError(f"k0 must be >= 0, got {k0}")
    return params.lambda_ratio < params.coupling_ratio < corollary2_bound(params, k0)


def positivity_constraint(params: Params) -> PositivityVerdict:
    """
    Where positive fully nontrivial solutions can exist.

    Symmetric parameters carry the family (cos θ·u_s, sin θ·u_s). Otherwise
    positive solutions need s < (α - β)/(λ₁ - λ₂); that bound must be positive
    and is capped by min{α/λ₁, β/λ₂}. Otherwise none exist for any s.
    """
    a, b = params.alpha, params.beta
    l1, l2 = params.lambda1, params.lambda2
    if a == b and l1 == l2:
        return PositivityVerdict(kind=PositivityKind.SYMMETRIC_FAMILY)
    if l1 == l2:
        return PositivityVerdict(kind=PositivityKind.NO_POSITIVE)
    bound = (a - b) / (l1 - l2)
    if 0.0 < bound < min(params.s_star_u, params.s_star_v):
        return PositivityVerdict(kind=PositivityKind.BOUND, bound=bound)
    return PositivityVerdict(kind=PositivityKind.NO_POSITIVE)


def default_s_grid(params: Params, config: Optional[BifurcationConfig] = None) -> np.ndarray:
    """Log-spaced samples in (s_min_fraction, s_max_fraction)·α/λ₁."""
    config = config or BifurcationConfig()
    s_star = params.s_star_u
    return np.geomspace(
        config.s_min_fraction * s_star, config.s_max_fraction * s_star, config.s_count
    )


def _sign_changes(values: np.ndarray) -> List[Tuple[int, int]]:
    """Index pairs (i, j) of consecutive finite samples with a sign change of values."""
    finite = np.nonzero(np.isfinite(values))[0]
    pairs = []
    for i, j in zip(finite[:-1], finite[1:]):
        if values[i] == 0.0 or values[i] * values[j] < 0.0:
            pairs.append((int(i), int(j)))
    return pairs


class BifurcationAnalyzer:
    """
    Scanner for the roots s_k of μ_k(s) = 1.

    Every sign change of μ_k - 1 on the s-grid is refined with Brent's
    method; all crossings are reported.
    """

    COMPONENT = "BifurcationAnalyzer"

    def __init__(
        self,
        spectrum: Optional[SpectrumSolver] = None,
        config: Optional[BifurcationConfig] = None,
        logger=None,
    ):
        """
        Initialize bifurcation analyzer.

        Args:
            spectrum: Solver for μ_k(s)
            config: Bifurcation search settings
            logger: Optional LoggingManager instance
        """
        self.spectrum = spectrum or SpectrumSolver(logger=logger)
        self.config = config or BifurcationConfig()
        self.logger = logger

    def check_hypothesis(self, params: Params) -> None:
        """
        Require λ₂/λ₁ < β/α.

        Raises:
            HypothesisError: If the hypothesis fails
        """
        if not params.lambda_ratio < params.coupling_ratio:
            error = HypothesisError(
                f"bifurcation from (u_s, 0) requires lambda2/lambda1 < beta/alpha, got "
                f"{params.lambda_ratio:.6g} >= {params.coupling_ratio:.6g}"
            )
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="check_hypothesis",
                    message=str(error),
                    metadata=params.to_dict(),
                )
            raise error

    def _mu_k(self, params: Params, grid: RadialGrid, k: int, s: float) -> float:
        spectrum = self.spectrum.spectrum_at(params.with_s(s), grid, k + 1)
        if spectrum.count <= k:
            return 0.0
        return float(spectrum.eigenvalues[k])

    def search(
        self,
        params: Params,
        grid: RadialGrid,
        k_range: Iterable[int],
        s_grid: Optional[np.ndarray] = None,
        tol: Optional[float] = None,
    ) -> BifurcationSearch:
        """
        Find every bifurcation point for the requested indices.

        Args:
            params: Parameters (s is ignored)
            grid: Radial grid
            k_range: Eigenvalue indices to scan
            s_grid: Sample points in (0, α/λ₁); default log-spaced grid
            tol: Tolerance on |μ_k(s_k) - 1|

        Returns:
            BifurcationSearch with points ordered by (k, s_k)

        Raises:
            HypothesisError: If λ₂/λ₁ >= β/α
            DomainError: If the s-grid leaves (0, α/λ₁)
        """
        self.check_hypothesis(params)
        ks = sorted(set(int(k) for k in k_range))
        if not ks or ks[0] < 0:
            raise DomainError(f"k_range must hold nonnegative indices, got {ks}")
        s_grid = default_s_grid(params, self.config) if s_grid is None else np.asarray(s_grid)
        if np.any(s_grid <= 0) or np.any(s_grid >= params.s_star_u):
            raise DomainError(f"s_grid must lie in (0, {params.s_star_u}) = (0, alpha/lambda1)")
        tol = self.config.tol if tol is None else tol

        curves = self.spectrum.eigenvalue_curves(params, s_grid, ks[-1] + 1, grid)
        points: List[BifurcationPoint] = []
        no_crossing: List[int] = []
        for k in ks:
            found = self._refine_crossings(params, grid, curves, k, tol)
            if not found:
                no_crossing.append(k)
            points.extend(found)

        if self.logger:
            self.logger.info(
                component=self.COMPONENT,
                operation="search",
                message=f"Found {len(points)} bifurcation points",
                metadata={
                    "points": [(p.k, p.s_k) for p in points],
                    "no_crossing": no_crossing,
                    "samples": len(s_grid),
                },
            )
        return BifurcationSearch(points=points, no_crossing=no_crossing, curves=curves)

    def _refine_crossings(
        self, params: Params, grid: RadialGrid, curves: EigenCurves, k: int, tol: float
    ) -> List[BifurcationPoint]:
        shifted = curves.mu[:, k] - 1.0
        points = []
        for i, j in _sign_changes(shifted):
            s_lo, s_hi = float(curves.s_values[i]), float(curves.s_values[j])
            if shifted[i] == 0.0:
                s_k = s_lo
            else:
                slope = abs(shifted[j] - shifted[i]) / (s_hi - s_lo)
                s_k = optimize.brentq(
                    lambda s: self._mu_k(params, grid, k, s) - 1.0,
                    s_lo,
                    s_hi,
                    xtol=tol / max(1.0, 10.0 * slope),
                    maxiter=200,
                )
            spectrum = self.spectrum.spectrum_at(params.with_s(s_k), grid, k + 1)
            mu_residual = abs(float(spectrum.eigenvalues[k]) - 1.0)
            if mu_residual > tol and self.logger:
                self.logger.warning(
                    component=self.COMPONENT,
                    operation="refine",
                    message=f"Refined crossing for k={k} misses tolerance",
                    metadata={"s_k": s_k, "mu_residual": mu_residual, "tol": tol},
                )
            points.append(
                BifurcationPoint(
                    k=k,
                    s_k=s_k,
                    kernel_fn=spectrum.eigenfunctions[k],
                    bracket=(s_lo, s_hi),
                    mu_residual=mu_residual,
                )
            )
        return points


def find_bifurcation_points(
    params: Params,
    k_range: Iterable[int],
    s_grid: Optional[np.ndarray] = None,
    tol: float = 1e-8,
    grid: Optional[RadialGrid] = None,
    analyzer: Optional[BifurcationAnalyzer] = None,
) -> List[BifurcationPoint]:
    """
    Roots of μ_k(s) = 1 for k in k_range; empty for indices without a crossing.

    Raises:
        HypothesisError: If λ₂/λ₁ >= β/α
    """
    grid = grid or RadialGrid.for_params(params, num_points=4001)
    analyzer = analyzer or BifurcationAnalyzer()
    return analyzer.search(params, grid, k_range, s_grid=s_grid, tol=tol).points


def accumulation_gap(points: List[BifurcationPoint], params: Params) -> float:
    """Distance of the largest s_k from α/λ₁; math.inf without points."""
    if not points:
        return math.inf
    return params.s_star_u - max(p.s_k for p in points)
