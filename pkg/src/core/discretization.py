"""
Finite-volume discretization of the radial Laplacian.

Node i owns the cell [r_i - h/2, r_i + h/2] clipped to [0, r_max]. The
operator -Δ_h = V⁻¹K is built from exact cell volumes V_i = ∫ r^{n-1} dr and
face weights r_{i+1/2}^{n-1}, so K is symmetric and the weighted problem is
self-adjoint. At r = 0 the first face has zero weight (Neumann), which
reproduces Δu(0) ≈ n·u''(0) = 2n(u₁ - u₀)/h². The node at r_max carries the
Dirichlet condition.

Quadrature uses the same cell volumes and face weights, so discrete
solutions satisfy the discrete Nehari identity exactly.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from src.models import RadialGrid

SPHERE_AREA = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}


@dataclass(frozen=True, eq=False)
class RadialOperator:
    """
    Discrete radial Laplacian and matching quadrature on one grid.

    Attributes:
        grid: Radial grid
        n: Dimension
        volumes: Cell volumes ∫ r^{n-1} dr per node
        faces: Face weights r_{i+1/2}^{n-1} between consecutive nodes
        area: Surface area of the unit sphere (2 for n = 1, full-line convention)
    """
    grid: RadialGrid
    n: int
    volumes: np.ndarray
    faces: np.ndarray
    area: float

    @property
    def h(self) -> float:
        return self.grid.h

    def stiffness_apply(self, values: np.ndarray) -> np.ndarray:
        """K·u over all nodes (the last row uses the half cell at r_max)."""
        flux = self.faces * np.diff(values) / self.h
        out = np.zeros_like(values, dtype=float)
        out[:-1] -= flux
        out[1:] += flux
        return out

    def minus_laplacian(self, values: np.ndarray) -> np.ndarray:
        """-Δ_h u at every node; the Dirichlet node is set to 0."""
        out = self.stiffness_apply(values) / self.volumes
        out[-1] = 0.0
        return out

    def stiffness_matrix(self) -> sparse.csr_matrix:
        """Symmetric K on all nodes."""
        w = self.faces / self.h
        main = np.zeros(self.grid.num_points)
        main[:-1] += w
        main[1:] += w
        return sparse.diags([-w, main, -w], [-1, 0, 1], format="csr")

    def minus_laplacian_matrix(self) -> sparse.csr_matrix:
        """-Δ_h as a sparse matrix whose last (Dirichlet) row is zero."""
        inv_v = 1.0 / self.volumes
        inv_v[-1] = 0.0
        return (sparse.diags(inv_v) @ self.stiffness_matrix()).tocsr()

    def interior_stiffness(self) -> sparse.csc_matrix:
        """K restricted to the unknowns 0..N-2 (u_{N-1} = 0 eliminated)."""
        return self.stiffness_matrix()[:-1, :-1].tocsc()

    def interior_volumes(self) -> np.ndarray:
        return self.volumes[:-1]

    def integrate(self, values: np.ndarray) -> float:
        """∫ f dx over ℝⁿ for a radial f."""
        return float(self.area * np.dot(self.volumes, values))

    def dirichlet_energy(self, values: np.ndarray) -> float:
        """∫ |∇u|² dx."""
        return float(self.area * np.sum(self.faces * np.diff(values) ** 2) / self.h)

    def lambda_norm_squared(self, values: np.ndarray, lam: float) -> float:
        """‖u‖²_λ = ∫ |∇u|² + λu²."""
        return self.dirichlet_energy(values) + lam * self.integrate(values * values)


@lru_cache(maxsize=64)
def radial_operator(grid: RadialGrid, n: int) -> RadialOperator:
    """
    Build (and cache) the radial operator for a grid and dimension.

    Args:
        grid: Radial grid
        n: Dimension (1, 2 or 3)

    Returns:
        RadialOperator with volumes, face weights and sphere area
    """
    r = grid.nodes
    h = grid.h
    lower = np.clip(r - 0.5 * h, 0.0, grid.r_max)
    upper = np.clip(r + 0.5 * h, 0.0, grid.r_max)
    volumes = (upper**n - lower**n) / n
    midpoints = 0.5 * (r[:-1] + r[1:])
    faces = midpoints ** (n - 1)
    volumes.setflags(write=False)
    faces.setflags(write=False)
    return RadialOperator(
        grid=grid, n=n, volumes=volumes, faces=faces, area=SPHERE_AREA[n]
    )
