"""
Spectrum of L(s)φ = (-Δ + λ₂)⁻¹(W_s φ) on the semitrivial branch (u_s, 0).

The eigenproblem μ(-Δ_h + λ₂)φ = W_s φ is solved as the symmetric pencil
(diag(V·W), K + λ₂·diag(V)) on the interior nodes, where K and V are the
finite-volume stiffness matrix and cell volumes of the radial grid.
"""

import math
from typing import List, Optional, Sequence

import numpy as np
from scipy import linalg, optimize, sparse
from scipy.sparse.linalg import eigsh

from src.config import SpectrumConfig
from src.core.discretization import radial_operator
from src.core.model import scalar_nonlinearity_derivative
from src.exceptions import DomainError, SaturatedNLSError, TruncationError, ValidationError
from src.ground_state import GroundStateSolver
from src.models import (
    EigenCurves,
    NondegeneracyReport,
    Params,
    Potential,
    RadialGrid,
    RadialProfile,
    ScalarProblem,
    Spectrum,
)

# pencils up to this many unknowns are solved densely
DENSE_LIMIT = 400
# eigenvalues below this fraction of μ₀ count as the kernel of diag(V·W)
POSITIVE_FLOOR = 1e-12


def potential_Ws(us: RadialProfile, params: Params) -> Potential:
    """
    W_s = αβ·u_s²/(1 + s·α·u_s²).

    Args:
        us: Ground state u_s
        params: Parameters including s

    Returns:
        Nonnegative potential, maximal at r = 0
    """
    au2 = params.alpha * us.values * us.values
    return Potential(us.grid, params.beta * au2 / (1.0 + params.s * au2))


def _normalized(vector: np.ndarray) -> np.ndarray:
    phi = np.append(vector, 0.0)
    phi = phi / np.max(np.abs(phi))
    if phi[0] < 0:
        phi = -phi
    return phi


def _pencil_spectrum(
    grid: RadialGrid, weights: np.ndarray, lam: float, n: int, k_max: int
) -> Spectrum:
    """Largest μ of μ(K + λV)φ = diag(weights)φ on the interior nodes."""
    if k_max < 1:
        raise ValidationError(f"k_max must be >= 1, got {k_max}")

    op = radial_operator(grid, n)
    interior = op.interior_volumes()
    diag_w = interior * weights[:-1]
    rank = int(np.count_nonzero(diag_w > 0))
    k = min(k_max, rank)
    if k == 0:
        return Spectrum(np.empty(0), [], requested=k_max, truncated=True)

    stiffness = (op.interior_stiffness() + sparse.diags(lam * interior)).tocsc()
    m = len(interior)
    if m <= DENSE_LIMIT or k >= m - 1:
        vals, vecs = linalg.eigh(np.diag(diag_w), stiffness.toarray())
    else:
        vals, vecs = eigsh(
            sparse.diags(diag_w).tocsc(), k=k, M=stiffness, which="LA", v0=np.ones(m)
        )
    order = np.argsort(vals)[::-1][:k]
    vals = vals[order]
    vecs = vecs[:, order]

    keep = vals > POSITIVE_FLOOR * max(vals[0], 0.0)
    vals = vals[keep]
    functions = [RadialProfile(grid, _normalized(vecs[:, i])) for i in np.nonzero(keep)[0]]
    return Spectrum(
        eigenvalues=vals,
        eigenfunctions=functions,
        requested=k_max,
        truncated=len(vals) < k_max,
    )


def eigenvalues_L(w: Potential, lambda2: float, n: int, k_max: int) -> Spectrum:
    """
    Largest eigenvalues of L = (-Δ + λ₂)⁻¹(W ·) with eigenfunctions.

    Args:
        w: Nonnegative potential
        lambda2: Potential constant λ₂
        n: Dimension
        k_max: Number of eigenvalues requested

    Returns:
        Spectrum with μ₀ > μ₁ > ...; truncated when fewer positive eigenvalues exist

    Raises:
        ValidationError: If k_max < 1
    """
    return _pencil_spectrum(w.grid, w.values, lambda2, n, k_max)


def mu_bar_closed_form(params: Params, k: int) -> float:
    """(β/α)·2/((ω + 2k)(ω + 2k + 1)) with ω = √(λ₂/λ₁), valid in n = 1."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    omega = params.omega
    return params.coupling_ratio * 2.0 / ((omega + 2 * k) * (omega + 2 * k + 1))


def mu_bar(
    params: Params,
    k: int,
    grid: Optional[RadialGrid] = None,
    solver: Optional[GroundStateSolver] = None,
) -> float:
    """
    Limit of μ_k(s) as s → 0.

    n = 1 uses the closed form; n = 2, 3 take the k-th eigenvalue of
    (-Δ + λ₂)⁻¹(αβu₀² ·) with the discrete cubic ground state u₀.

    Raises:
        DomainError: If k < 0
        TruncationError: If the grid holds fewer than k + 1 positive eigenvalues
    """
    if params.n == 1:
        return mu_bar_closed_form(params, k)
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    grid = grid or RadialGrid.for_params(params, num_points=4001)
    solver = solver or GroundStateSolver()
    cubic = params.with_s(0.0)
    u0 = solver.discrete(cubic.scalar_u(), grid)
    spectrum = eigenvalues_L(potential_Ws(u0, cubic), params.lambda2, params.n, k + 1)
    if spectrum.count <= k:
        raise TruncationError(f"only {spectrum.count} positive eigenvalues on this grid")
    return float(spectrum.eigenvalues[k])


def mu_bar_upper_bound(params: Params) -> float:
    """(β/α)(λ₁/λ₂)^{(4-n)/4}, an upper estimate of μ̄₀ for n = 2, 3."""
    return params.coupling_ratio * (params.lambda1 / params.lambda2) ** ((4 - params.n) / 4.0)


def mu_limit_saturation(params: Params) -> float:
    """βλ₁/(αλ₂): common limit of every μ_k(s) as s → α/λ₁."""
    return params.beta * params.lambda1 / (params.alpha * params.lambda2)


def box_potential(grid: RadialGrid, kappa: float, eps: float, n: int) -> Potential:
    """
    (κ - ε)·1_{r < 1/ε} averaged over each finite-volume cell.

    Raises:
        DomainError: If κ - ε <= 0
        TruncationError: If 1/ε >= r_max
    """
    if kappa - eps <= 0:
        raise DomainError(f"box height kappa - eps must be positive, got {kappa - eps}")
    radius = 1.0 / eps
    if radius >= grid.r_max:
        raise TruncationError(f"box radius 1/eps = {radius} must be below r_max = {grid.r_max}")

    op = radial_operator(grid, n)
    r = grid.nodes
    lower = np.clip(r - 0.5 * grid.h, 0.0, grid.r_max)
    upper = np.clip(r + 0.5 * grid.h, 0.0, grid.r_max)
    inside = np.clip(np.minimum(upper, radius) ** n - lower**n, 0.0, None) / n
    return Potential(grid, (kappa - eps) * inside / op.volumes)


def box_potential_eigen(
    kappa: float, lam: float, eps: float, k: int, n: int, grid: RadialGrid
) -> float:
    """
    k-th eigenvalue of (-Δ + λ)⁻¹((κ - ε)1_{B_{1/ε}} ·).

    Tends to κ/λ as ε → 0.
    """
    spectrum = eigenvalues_L(box_potential(grid, kappa, eps, n), lam, n, k + 1)
    if spectrum.count <= k:
        raise TruncationError(f"only {spectrum.count} positive eigenvalues for the box potential")
    return float(spectrum.eigenvalues[k])


def square_well_eigenvalue_1d(kappa: float, lam: float, eps: float, k: int) -> float:
    """
    Even eigenvalue μ_k of the 1D box operator on the whole line.

    Inside |x| < L = 1/ε the eigenfunction is cos(qx), outside e^{-√λ|x|};
    matching gives q·tan(qL) = √λ with q in (kπ/L, (k + ½)π/L), and
    μ = (κ - ε)/(q² + λ).
    """
    if kappa - eps <= 0:
        raise DomainError(f"box height kappa - eps must be positive, got {kappa - eps}")
    half_width = 1.0 / eps
    root_lam = math.sqrt(lam)

    def matching(q: float) -> float:
        return q * math.sin(q * half_width) - root_lam * math.cos(q * half_width)

    lo = k * math.pi / half_width
    hi = (k + 0.5) * math.pi / half_width
    q = optimize.brentq(matching, lo, hi, xtol=1e-15, rtol=1e-14, maxiter=200)
    return (kappa - eps) / (q * q + lam)


def check_nondegeneracy(
    us: RadialProfile, prob: ScalarProblem, k_max: int = 6, threshold: float = 1e-6
) -> NondegeneracyReport:
    """
    Radial spectrum of (-Δ + λ)⁻¹(f'(u_s) ·).

    u_s is nondegenerate among radial functions when 1 is not an eigenvalue;
    the ground state has exactly one eigenvalue above 1.
    """
    weights = scalar_nonlinearity_derivative(us.values, prob.coupling, prob.s)
    spectrum = _pencil_spectrum(us.grid, weights, prob.lam, prob.n, k_max)
    distance = float(np.min(np.abs(spectrum.eigenvalues - 1.0))) if spectrum.count else math.inf
    return NondegeneracyReport(
        eigenvalues=spectrum.eigenvalues,
        distance_from_one=distance,
        morse_index=int(np.count_nonzero(spectrum.eigenvalues > 1.0)),
        nondegenerate=distance > threshold,
    )


class SpectrumSolver:
    """
    Eigenvalue curves μ_k(s) along the semitrivial branch.

    Uses the discrete ground state of a GroundStateSolver so that the kernel
    at μ_k(s) = 1 matches the discrete Jacobian exactly.
    """

    COMPONENT = "SpectrumSolver"

    def __init__(
        self,
        ground_state: Optional[GroundStateSolver] = None,
        config: Optional[SpectrumConfig] = None,
        logger=None,
    ):
        """
        Initialize spectrum solver.

        Args:
            ground_state: Solver providing u_s
            config: Spectrum settings
            logger: Optional LoggingManager instance
        """
        self.ground_state = ground_state or GroundStateSolver(logger=logger)
        self.config = config or SpectrumConfig()
        self.logger = logger

    def s_upper(self, params: Params) -> float:
        """Largest s for which spectra are computed."""
        return (1.0 - self.config.end_margin) * params.s_star_u

    def spectrum_at(self, params: Params, grid: RadialGrid, k_max: int) -> Spectrum:
        """
        Spectrum of L(s) at s = params.s.

        Raises:
            ExistenceWindowError: If u_s does not exist
        """
        us = self.ground_state.discrete(params.scalar_u(), grid)
        spectrum = eigenvalues_L(potential_Ws(us, params), params.lambda2, params.n, k_max)
        if spectrum.truncated and self.logger:
            self.logger.warning(
                component=self.COMPONENT,
                operation="spectrum_at",
                message=f"Only {spectrum.count} of {k_max} positive eigenvalues available",
                metadata={"s": params.s, "requested": k_max, "available": spectrum.count},
            )
        return spectrum

    def eigenvalue_curves(
        self,
        params: Params,
        s_values: Sequence[float],
        k_max: int,
        grid: RadialGrid,
    ) -> EigenCurves:
        """
        Sample μ_0..μ_{k_max-1} on an s-grid.

        Samples beyond the end margin, or where the ground state fails, are NaN.
        """
        s_values = np.asarray(s_values, dtype=float)
        mu = np.full((len(s_values), k_max), np.nan)
        s_upper = self.s_upper(params)
        skipped: List[float] = []

        if self.logger:
            with self.logger.log_timing(
                self.COMPONENT, "eigenvalue_curves", {"samples": len(s_values), "k_max": k_max}
            ) as details:
                skipped = self._fill_curves(params, s_values, k_max, grid, mu, s_upper)
                details["skipped"] = len(skipped)
        else:
            skipped = self._fill_curves(params, s_values, k_max, grid, mu, s_upper)

        if skipped and self.logger:
            self.logger.warning(
                component=self.COMPONENT,
                operation="eigenvalue_curves",
                message=f"{len(skipped)} s-samples skipped near the window end",
                metadata={"s_upper": s_upper, "first_skipped": skipped[0]},
            )
        return EigenCurves(s_values=s_values, mu=mu, params=params)

    def _fill_curves(self, params, s_values, k_max, grid, mu, s_upper) -> List[float]:
        skipped = []
        for row, s in enumerate(s_values):
            if not 0.0 <= s <= s_upper:
                skipped.append(float(s))
                continue
            try:
                spectrum = self.spectrum_at(params.with_s(float(s)), grid, k_max)
            except SaturatedNLSError as e:
                if self.logger:
                    self.logger.log_error(self.COMPONENT, "eigenvalue_curves", e, {"s": float(s)})
                skipped.append(float(s))
                continue
            mu[row, : spectrum.count] = spectrum.eigenvalues
        return skipped

    def mu_bar(self, params: Params, k: int, grid: Optional[RadialGrid] = None) -> float:
        return mu_bar(params, k, grid=grid, solver=self.ground_state)

    def check_nondegeneracy(
        self, prob: ScalarProblem, grid: RadialGrid, k_max: int = 6
    ) -> NondegeneracyReport:
        """Nondegeneracy of the discrete ground state of `prob`."""
        report = check_nondegeneracy(self.ground_state.discrete(prob, grid), prob, k_max)
        if self.logger:
            self.logger.info(
                component=self.COMPONENT,
                operation="check_nondegeneracy",
                message=f"Morse index {report.morse_index}, distance from 1 "
                f"{report.distance_from_one:.3e}",
                metadata={"s": prob.s, "nondegenerate": report.nondegenerate},
            )
        return report
