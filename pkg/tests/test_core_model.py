"""
Tests for the core model.

This module checks the saturation function, the finite-volume radial
discretization and its quadrature, and the discrete residual.
"""

import math

import numpy as np
import pytest

from src.core import (
    BoundedCache,
    intensity_Z,
    radial_operator,
    residual,
    residual_norm,
    saturated_ratio,
    saturation_energy_density,
    saturation_g,
)
from src.core.model import (
    decay_rate,
    residual_floor,
    saturation_bound,
    scalar_nonlinearity,
    scalar_nonlinearity_derivative,
)
from src.exceptions import DomainError, ValidationError
from src.models import Params, RadialGrid, RadialProfile, StatePair


@pytest.fixture
def params():
    """λ₂/λ₁ = 1/4 with equal couplings."""
    return Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, s=0.0, n=1)


@pytest.fixture
def grid():
    return RadialGrid(r_max=15.0, num_points=4001)


def sech_state(grid):
    return StatePair.semitrivial(RadialProfile(grid, math.sqrt(2.0) / np.cosh(grid.nodes)))


@pytest.mark.unit
def test_saturation_g_closed_form():
    """g(1) = 1 - ln 2 and g(0) = 0."""
    assert saturation_g(0.0) == 0.0
    assert saturation_g(1.0) == pytest.approx(1.0 - math.log(2.0), rel=1e-15)


@pytest.mark.unit
def test_saturation_g_series_branch_is_continuous():
    """Series and closed form agree across the switch point."""
    below = saturation_g(np.nextafter(1e-4, 0.0))
    above = saturation_g(1e-4)
    assert below == pytest.approx(above, rel=1e-10)
    # z²/2 leading order for tiny z
    assert saturation_g(1e-8) == pytest.approx(0.5e-16, rel=1e-7)


@pytest.mark.unit
def test_saturation_g_vectorized_and_negative_rejected():
    """Arrays keep their shape; negative z raises DomainError."""
    values = saturation_g(np.array([0.0, 1e-6, 0.5, 3.0]))
    assert values.shape == (4,)
    assert np.all(np.diff(values) > 0)
    with pytest.raises(DomainError):
        saturation_g(-1e-3)


@pytest.mark.unit
def test_energy_density_has_cubic_limit():
    """g(sZ)/(2s²) tends to Z²/4 as s -> 0."""
    z = np.linspace(0.0, 2.0, 11)
    cubic = saturation_energy_density(z, 0.0)
    np.testing.assert_allclose(cubic, 0.25 * z * z)
    np.testing.assert_allclose(saturation_energy_density(z, 1e-7), cubic, rtol=1e-6, atol=1e-18)


@pytest.mark.unit
def test_saturated_ratio_is_bounded_by_inverse_s():
    """Z/(1 + sZ) stays below 1/s."""
    z = np.geomspace(1e-3, 1e6, 50)
    assert np.all(saturated_ratio(z, 0.5) < saturation_bound(0.5))
    assert saturation_bound(0.0) == math.inf


@pytest.mark.unit
def test_scalar_nonlinearity_derivative_matches_difference_quotient():
    """f' agrees with a central difference of f."""
    u = np.linspace(0.1, 2.0, 20)
    delta = 1e-6
    upper = scalar_nonlinearity(u + delta, 1.3, 0.4)
    lower = scalar_nonlinearity(u - delta, 1.3, 0.4)
    numeric = (upper - lower) / (2 * delta)
    np.testing.assert_allclose(scalar_nonlinearity_derivative(u, 1.3, 0.4), numeric, rtol=1e-7)


@pytest.mark.unit
def test_intensity_Z(grid, params):
    """Z = αu² + βv² pointwise."""
    u = RadialProfile(grid, np.full(grid.num_points, 2.0))
    v = RadialProfile(grid, np.full(grid.num_points, 3.0))
    weighted = Params(lambda1=1.0, lambda2=0.5, alpha=0.5, beta=2.0)
    z = intensity_Z(StatePair(u, v), weighted)
    np.testing.assert_allclose(z.values, 0.5 * 4.0 + 2.0 * 9.0)


@pytest.mark.unit
def test_residual_of_exact_cubic_ground_state_is_small(grid, params):
    """(√2 sech, 0) solves the s = 0 system up to discretization error."""
    ru, rv = residual(sech_state(grid), params)
    assert np.max(np.abs(ru.values)) < 1e-4
    assert np.max(np.abs(rv.values)) == 0.0


@pytest.mark.unit
def test_residual_discretization_error_is_second_order(params):
    """Halving h reduces the residual of the exact solution about fourfold."""
    coarse = RadialGrid(r_max=15.0, num_points=1001)
    fine = coarse.refined()
    ratio = residual_norm(sech_state(coarse), params) / residual_norm(sech_state(fine), params)
    assert 3.0 < ratio < 5.0


@pytest.mark.unit
def test_zero_state_has_zero_residual(grid, params):
    """The trivial state is an exact solution."""
    assert residual_norm(StatePair.zeros(grid), params) == 0.0


@pytest.mark.unit
@pytest.mark.parametrize("n,expected", [(1, math.sqrt(math.pi)), (3, math.pi**1.5)])
def test_quadrature_integrates_gaussian(n, expected):
    """∫ e^{-|x|²} dx over ℝⁿ."""
    grid = RadialGrid(r_max=8.0, num_points=4001)
    op = radial_operator(grid, n)
    assert op.integrate(np.exp(-grid.nodes**2)) == pytest.approx(expected, rel=1e-5)


@pytest.mark.unit
@pytest.mark.parametrize("n", [1, 2, 3])
def test_stiffness_matrix_is_symmetric_and_matches_apply(n):
    """K is symmetric and K·u equals stiffness_apply(u)."""
    grid = RadialGrid(r_max=5.0, num_points=101)
    op = radial_operator(grid, n)
    k = op.stiffness_matrix()
    assert abs(k - k.T).max() == 0.0
    u = np.cos(grid.nodes)
    np.testing.assert_allclose(k @ u, op.stiffness_apply(u), atol=1e-12)


@pytest.mark.unit
def test_discrete_laplacian_at_origin_in_3d():
    """-Δ_h r² = -2n at the origin and in the interior."""
    grid = RadialGrid(r_max=4.0, num_points=401)
    op = radial_operator(grid, 3)
    lap = op.minus_laplacian(grid.nodes**2)
    np.testing.assert_allclose(lap[:-2], -6.0, rtol=1e-9)


@pytest.mark.unit
def test_dirichlet_energy_matches_integration_by_parts():
    """∫|∇u|² = ∫ u·(-Δ_h u) for u vanishing at r_max."""
    grid = RadialGrid(r_max=10.0, num_points=801)
    op = radial_operator(grid, 2)
    u = np.exp(-grid.nodes**2)
    u[-1] = 0.0
    by_parts = op.area * float(np.dot(u, op.stiffness_apply(u)))
    assert op.dirichlet_energy(u) == pytest.approx(by_parts, rel=1e-12)


@pytest.mark.unit
def test_residual_floor_scales_with_grid():
    """The rounding floor grows like 1/h²."""
    coarse = RadialGrid(r_max=10.0, num_points=1001)
    floor_coarse = residual_floor(coarse, 1.0, 1.0)
    floor_fine = residual_floor(coarse.refined(), 1.0, 1.0)
    assert 0.0 < floor_coarse < floor_fine
    assert floor_fine / floor_coarse == pytest.approx(4.0, rel=1e-2)


@pytest.mark.unit
def test_decay_rate_of_sech():
    """√2 sech(r) decays like e^{-r}."""
    grid = RadialGrid(r_max=30.0, num_points=3001)
    profile = RadialProfile(grid, math.sqrt(2.0) / np.cosh(grid.nodes))
    assert decay_rate(profile, 1) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.unit
def test_decay_rate_rejects_short_tail():
    """A profile without a resolved tail cannot be fitted."""
    grid = RadialGrid(r_max=2.0, num_points=21)
    with pytest.raises(ValidationError):
        decay_rate(RadialProfile(grid, 1.0 - 0.5 * grid.nodes), 1)
    with pytest.raises(ValidationError):
        decay_rate(RadialProfile.zeros(grid), 1)


@pytest.mark.unit
def test_dirichlet_residual_shrinks_with_truncation_radius(params):
    """The residual at r_max is the truncated tail and falls for r_max = 10, 20, 30."""
    tails = []
    for r_max in (10.0, 20.0, 30.0):
        grid = RadialGrid(r_max=r_max, num_points=int(100 * r_max) + 1)
        r_u, r_v = residual(sech_state(grid), params)
        assert r_v.values[-1] == 0.0
        tails.append(abs(r_u.values[-1]))
    assert tails[0] > tails[1] > tails[2] > 0.0
    assert tails[0] < 1e-3


@pytest.mark.unit
def test_residual_is_translation_free(params):
    """In 1D the interior residual depends only on the values and the spacing."""
    grid = RadialGrid(r_max=20.0, num_points=2001)
    state = sech_state(grid)
    shift = 150
    shifted_grid = RadialGrid(
        r_max=grid.h * (grid.num_points - 1 - shift), num_points=grid.num_points - shift
    )
    shifted = StatePair.semitrivial(RadialProfile(shifted_grid, state.u.values[shift:]))

    original = residual(state, params)[0].values
    moved = residual(shifted, params)[0].values

    np.testing.assert_allclose(moved[1:-1], original[shift + 1:-1], rtol=0.0, atol=1e-9)


@pytest.mark.unit
def test_bounded_cache_evicts_least_recently_used():
    """A read refreshes an entry, so the untouched oldest one is dropped."""
    cache = BoundedCache(maxsize=2)
    cache["a"] = 1
    cache["b"] = 2
    assert cache["a"] == 1
    cache["c"] = 3

    assert len(cache) == 2
    assert "a" in cache and "c" in cache
    assert "b" not in cache
    with pytest.raises(ValidationError):
        BoundedCache(maxsize=0)
