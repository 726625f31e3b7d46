"""
Tests for the scalar ground-state solvers.

This module checks the 1D inverse-quadrature solver against the sech
closed form and an independent bisection, the n = 2, 3 shooting solver
against Pohozaev identities, the discrete Newton polish, and the
GroundStateSolver caching and logging.
"""

import math
import warnings
from unittest.mock import Mock

import numpy as np
import pytest
from scipy.integrate import IntegrationWarning

from src.config import GroundStateConfig
from src.core import radial_operator, residual_norm
from src.core.model import residual_floor
from src.exceptions import BracketNotFoundError, DomainError, ExistenceWindowError
from src.ground_state import (
    GroundStateSolver,
    ground_state_1d,
    ground_state_radial,
    peak_amplitude_1d,
    polish_profile,
    scaled_ground_state_s0,
    shooting_amplitude,
)
from src.models import Params, RadialGrid, ScalarProblem, StatePair


@pytest.fixture
def mock_logger():
    """Create a mock logger."""
    return Mock()


@pytest.fixture
def solver(mock_logger):
    return GroundStateSolver(logger=mock_logger)


def bisect(func, lo, hi, iterations=200):
    """Plain bisection used as an independent oracle."""
    f_lo = func(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.unit
def test_peak_amplitude_cubic_limit():
    """At s = 0 the peak is √(2λ)/c."""
    assert peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0)) == math.sqrt(2.0)
    assert peak_amplitude_1d(ScalarProblem(lam=4.0, coupling=2.0)) == pytest.approx(math.sqrt(2.0))


@pytest.mark.unit
def test_peak_amplitude_matches_independent_bisection():
    """(λ, α, s) = (1, 1, 0.5): a² solves 4·ln(1 + t/2) = t."""
    t = bisect(lambda t: 4.0 * math.log1p(0.5 * t) - t, 2.0, 20.0)
    a = peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=0.5))
    assert a == pytest.approx(math.sqrt(t), rel=1e-10)


@pytest.mark.unit
def test_peak_amplitude_grows_with_saturation():
    """Saturation weakens the nonlinearity, so the peak rises with s."""
    peaks = [
        peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=s)) for s in (0.0, 0.3, 0.6, 0.9)
    ]
    assert np.all(np.diff(peaks) > 0)


@pytest.mark.unit
def test_peak_amplitude_rejects_bad_input():
    """Outside the window or in n != 1 the 1D peak is undefined."""
    with pytest.raises(ExistenceWindowError) as exc_info:
        peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=1.0))
    assert "1" in str(exc_info.value)
    with pytest.raises(DomainError):
        peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=2))


@pytest.mark.unit
def test_ground_state_1d_matches_sech():
    """n = 1, λ = α = 1, s = 0 reproduces √2 sech(x) to 1e-6."""
    grid = RadialGrid(r_max=15.0, num_points=4000)
    profile = ground_state_1d(ScalarProblem(lam=1.0, coupling=1.0), grid)
    exact = math.sqrt(2.0) / np.cosh(grid.nodes)
    assert np.max(np.abs(profile.values - exact)) <= 1e-6


@pytest.mark.unit
def test_ground_state_1d_saturated_profile():
    """For s = 0.5 the profile peaks at u_s(0), decreases and solves the equation to O(h²)."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.5)
    grid = RadialGrid(r_max=30.0, num_points=12001)
    profile = ground_state_1d(prob, grid)

    assert profile.value_at_origin == pytest.approx(peak_amplitude_1d(prob), rel=1e-14)
    assert np.all(profile.values > 0)
    assert np.all(np.diff(profile.values) < 0)
    assert profile.tail_value < 1e-10

    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, s=0.5)
    assert residual_norm(StatePair.semitrivial(profile), params) < 1e-6


@pytest.mark.unit
def test_ground_state_1d_converges_uniformly_as_saturation_vanishes():
    """sup|u_s - u_0| shrinks along s = 0.2, 0.1, 0.05, 0.01."""
    grid = RadialGrid(r_max=20.0, num_points=2001)
    limit = ground_state_1d(ScalarProblem(lam=1.0, coupling=1.0), grid).values

    def gap(s):
        profile = ground_state_1d(ScalarProblem(lam=1.0, coupling=1.0, s=s), grid)
        return np.max(np.abs(profile.values - limit))

    gaps = [gap(s) for s in (0.2, 0.1, 0.05, 0.01)]
    assert np.all(np.diff(gaps) < 0)
    assert gaps[-1] < 0.05


@pytest.mark.unit
def test_ground_state_1d_near_saturation_is_warning_free():
    """Quadrature close to α/λ₁ stays quiet and still returns u_s."""
    grid = RadialGrid(r_max=60.0, num_points=6001)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        for s in (0.95, 0.97, 0.99):
            prob = ScalarProblem(lam=1.0, coupling=1.0, s=s)
            profile = ground_state_1d(prob, grid)
            assert profile.value_at_origin == pytest.approx(peak_amplitude_1d(prob), rel=1e-12)
            assert np.all(profile.values > 0)
            assert np.all(np.diff(profile.values) <= 0)


@pytest.mark.unit
def test_scaled_ground_state_s0_agrees_with_quadrature():
    """u₀(x) = (√λ/c)·√2 sech(√λ x) for λ = 4, c = 2."""
    prob = ScalarProblem(lam=4.0, coupling=2.0)
    grid = RadialGrid(r_max=10.0, num_points=2001)
    scaled = scaled_ground_state_s0(prob, grid)
    np.testing.assert_allclose(scaled.values, math.sqrt(2.0) / np.cosh(2.0 * grid.nodes))
    assert np.max(np.abs(ground_state_1d(prob, grid).values - scaled.values)) <= 1e-6


@pytest.mark.unit
def test_scaled_ground_state_requires_cubic_limit():
    """The scaling law is only valid at s = 0."""
    with pytest.raises(DomainError):
        scaled_ground_state_s0(ScalarProblem(lam=1.0, coupling=1.0, s=0.1), RadialGrid(10.0, 101))


@pytest.mark.slow
def test_ground_state_radial_townes_profile():
    """n = 2, cubic: Townes peak 2.2062 and Pohozaev ∫Q⁴ = 2∫Q²."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=2)
    grid = RadialGrid(r_max=20.0, num_points=4001)
    profile = ground_state_radial(prob, grid)
    op = radial_operator(grid, 2)
    u = profile.values

    assert profile.value_at_origin == pytest.approx(2.2062, rel=1e-3)
    assert np.all(u[:-1] > 0)
    assert op.integrate(u**4) == pytest.approx(2.0 * op.integrate(u**2), rel=1e-3)


@pytest.mark.slow
def test_ground_state_radial_3d_pohozaev_identities():
    """n = 3, cubic: ∫|∇Q|² = 3∫Q² and ∫Q⁴ = 4∫Q²."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=3)
    grid = RadialGrid(r_max=20.0, num_points=4001)
    profile = ground_state_radial(prob, grid)
    op = radial_operator(grid, 3)
    u = profile.values
    mass = op.integrate(u**2)

    assert op.dirichlet_energy(u) == pytest.approx(3.0 * mass, rel=2e-3)
    assert op.integrate(u**4) == pytest.approx(4.0 * mass, rel=2e-3)


@pytest.mark.slow
def test_scaling_law_in_2d():
    """Shooting directly and through the scaling law give the same peak."""
    prob = ScalarProblem(lam=4.0, coupling=1.0, s=0.0, n=2)
    grid = RadialGrid(r_max=10.0, num_points=2001)
    direct = ground_state_radial(prob, grid)
    scaled = scaled_ground_state_s0(prob, grid)
    assert direct.value_at_origin == pytest.approx(scaled.value_at_origin, rel=1e-6)



@pytest.mark.slow
def test_shooting_amplitude_3d_cubic_peak():
    """n = 3, λ = α = 1, s = 0: u(0) = 4.3374."""
    a = shooting_amplitude(ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=3), r_end=20.0)
    assert a == pytest.approx(4.3374, rel=1e-4)


@pytest.mark.slow
def test_shooting_amplitude_is_independent_of_bracket():
    """Different undershoot/overshoot starting pairs converge to the same u(0)."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=2)
    narrow = shooting_amplitude(prob, r_end=15.0, bracket=(1.5, 3.0))
    wide = shooting_amplitude(prob, r_end=15.0, bracket=(1.2, 6.0))
    default = shooting_amplitude(prob, r_end=15.0)
    assert narrow == pytest.approx(wide, rel=1e-8)
    assert narrow == pytest.approx(default, rel=1e-8)


@pytest.mark.unit
def test_shooting_rejects_bad_bracket():
    """A bracket that overshoots at both ends is reported with its interval."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=2)
    with pytest.raises(BracketNotFoundError) as exc_info:
        shooting_amplitude(prob, r_end=15.0, bracket=(10.0, 20.0))
    assert exc_info.value.interval == (10.0, 20.0)


@pytest.mark.unit
def test_ground_state_radial_requires_dimension_two_or_three():
    with pytest.raises(DomainError):
        ground_state_radial(ScalarProblem(lam=1.0, coupling=1.0), RadialGrid(10.0, 101))


@pytest.mark.unit
def test_polish_profile_reaches_discrete_solution():
    """After polishing, (u_s, 0) is a zero of the discrete residual."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.5)
    grid = RadialGrid(r_max=20.0, num_points=2001)
    continuum = ground_state_1d(prob, grid)
    polished = polish_profile(continuum, prob, tol=1e-11)

    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, s=0.5)
    target = max(1e-11, residual_floor(grid, polished.sup_norm(), 1.0))
    assert residual_norm(StatePair.semitrivial(polished), params) <= 2.0 * target
    assert polished.values[-1] == 0.0
    assert np.max(np.abs(polished.values - continuum.values)) < 1e-3


@pytest.mark.unit
def test_solver_caches_and_logs(solver, mock_logger):
    """solve() is computed once per (problem, grid) and logged with its component."""
    prob = ScalarProblem(lam=1.0, coupling=1.0, s=0.2)
    grid = RadialGrid(r_max=20.0, num_points=1001)

    first = solver.solve(prob, grid)
    second = solver.solve(prob, grid)

    assert first is second
    assert mock_logger.info.call_count == 1
    assert mock_logger.info.call_args.kwargs["component"] == "GroundStateSolver"

    discrete = solver.discrete(prob, grid)
    assert solver.discrete(prob, grid) is discrete
    mock_logger.debug.assert_called_once()

    solver.clear_cache()
    assert solver.solve(prob, grid) is not first


@pytest.mark.unit
def test_solver_warns_on_short_domain(solver, mock_logger):
    """A truncation radius too small for the decay triggers a warning."""
    solver.solve(ScalarProblem(lam=1.0, coupling=1.0), RadialGrid(r_max=5.0, num_points=501))
    mock_logger.warning.assert_called_once()
    assert mock_logger.warning.call_args.kwargs["operation"] == "check_tail"


@pytest.mark.unit
def test_solver_logs_window_errors(solver, mock_logger):
    """Errors are logged before they propagate."""
    with pytest.raises(ExistenceWindowError):
        solver.solve(ScalarProblem(lam=1.0, coupling=1.0, s=1.5), RadialGrid(20.0, 101))
    mock_logger.error.assert_called_once()
    assert mock_logger.error.call_args.kwargs["operation"] == "solve"


@pytest.mark.unit
def test_solver_cache_keeps_most_recent_profiles(mock_logger):
    """Past cache_size entries the least recently used profile is dropped."""
    solver = GroundStateSolver(config=GroundStateConfig(cache_size=2), logger=mock_logger)
    grid = RadialGrid(r_max=20.0, num_points=1001)
    problems = [ScalarProblem(lam=1.0, coupling=1.0, s=s) for s in (0.1, 0.2, 0.3)]

    first = solver.solve(problems[0], grid)
    for prob in problems[1:]:
        solver.solve(prob, grid)

    assert len(solver._continuum) == 2
    assert mock_logger.info.call_count == 3
    assert solver.solve(problems[0], grid) is not first
    assert mock_logger.info.call_count == 4
