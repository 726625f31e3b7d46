"""
Scalar ground states of -Δu + λu = c²u³/(1 + s·c·u²).

For n = 1 the first integral u'² = F(u) with F(x) = λx² - s⁻²g(s·c·x²)
gives the inverse function x(z) = ∫_z^a dx/√F(x), a = u(0). The peak
region is integrated in τ with z = a(1 - τ²), the tail in w = ln z, and the
grid values are recovered by a few vectorized Newton steps on x(z) = r.

For n = 2, 3 the radial ODE is shot from u(0) with an adaptive DOP853
integrator and u(0) is bisected between undershoot and overshoot. Beyond a
matching radius the solution is continued by the decaying Bessel solution
of the linearized equation.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate, optimize, sparse, special
from scipy.sparse.linalg import spsolve

from src.config import GridConfig, GroundStateConfig
from src.core.cache import BoundedCache
from src.core.discretization import radial_operator
from src.core.model import (
    decay_rate,
    residual_floor,
    saturation_g,
    scalar_nonlinearity,
    scalar_nonlinearity_derivative,
)
from src.exceptions import (
    BracketNotFoundError,
    ConvergenceError,
    DomainError,
    SaturatedNLSError,
    ValidationError,
)
from src.models import RadialGrid, RadialProfile, ScalarProblem

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)

# relative distance from the peak below which F is evaluated by its Taylor polynomial
NEAR_PEAK = 1e-5
QUAD_LIMIT = 500
# intervals whose quad error estimate exceeds QUAD_ACCEPT·|value| are halved, at most
# QUAD_MAX_SPLITS times
QUAD_ACCEPT = 1e-10
QUAD_MAX_SPLITS = 4
# the shooting solution is replaced by the Bessel tail once u < TAIL_MATCH_FRACTION·u(0)
TAIL_MATCH_FRACTION = 1e-4
UNDERSHOOT = "undershoot"
OVERSHOOT = "overshoot"


def _peak_function(t, prob: ScalarProblem):
    """φ(t) = F(x)/x² evaluated at t = x²."""
    t = np.asarray(t, dtype=float)
    c = prob.coupling
    if prob.s == 0.0:
        return prob.lam - 0.5 * c * c * t
    safe_t = np.where(t > 0, t, 1.0)
    value = prob.lam - np.asarray(saturation_g(prob.s * c * safe_t)) / (prob.s**2 * safe_t)
    return np.where(t > 0, value, prob.lam)


def _nonlinearity_second_derivative(x: float, c: float, s: float) -> float:
    d = 1.0 + s * c * x * x
    num = 3.0 * c * c * x * x + s * c**3 * x**4
    dnum = 6.0 * c * c * x + 4.0 * s * c**3 * x**3
    dd = 2.0 * s * c * x
    return dnum / d**2 - 2.0 * num * dd / d**3


def peak_amplitude_1d(prob: ScalarProblem, rtol: float = 1e-12) -> float:
    """
    Peak value u_s(0) of the one-dimensional ground state.

    Solves λa² - s⁻²g(s·c·a²) = 0 for a > 0 (a² = 2λ/c² at s = 0).

    Args:
        prob: Scalar problem with n = 1
        rtol: Relative tolerance of the root

    Returns:
        Positive peak amplitude

    Raises:
        DomainError: If n != 1
        ExistenceWindowError: If s is outside [0, c/λ)
        BracketNotFoundError: If no sign change is found
    """
    if prob.n != 1:
        raise DomainError(f"peak_amplitude_1d requires n = 1, got n = {prob.n}")
    prob.require_window()

    t0 = 2.0 * prob.lam / prob.coupling**2
    if prob.s == 0.0:
        return math.sqrt(t0)

    # g(z) < z²/2 puts the root above the cubic one
    hi = 2.0 * t0
    doublings = 0
    while float(_peak_function(hi, prob)) > 0.0:
        hi *= 2.0
        doublings += 1
        if doublings > 200:
            raise BracketNotFoundError(
                "peak equation has no sign change", (math.sqrt(t0), math.sqrt(hi))
            )

    rtol = max(rtol, 4.0 * float(np.finfo(float).eps))
    t = optimize.brentq(
        lambda t: float(_peak_function(t, prob)),
        t0,
        hi,
        xtol=1e-3 * rtol * t0,
        rtol=rtol,
        maxiter=500,
    )
    return math.sqrt(t)


class _InverseQuadrature:
    """Tabulated inverse function x(z) of the 1D ground state."""

    def __init__(self, prob: ScalarProblem, r_max: float, table_nodes: int):
        self.prob = prob
        self.a = peak_amplitude_1d(prob)
        a = self.a
        lam, c, s = prob.lam, prob.coupling, prob.s

        fa = scalar_nonlinearity(np.asarray(a), c, s)
        self._f1 = 2.0 * (lam * a - float(fa))
        self._f2 = 2.0 * (lam - float(scalar_nonlinearity_derivative(np.asarray(a), c, s)))
        self._f3 = -2.0 * _nonlinearity_second_derivative(a, c, s)
        if self._f1 >= 0.0:
            raise ValidationError("peak amplitude does not satisfy u''(0) < 0")

        self.tau_half = math.sqrt(0.5)
        self.tau_nodes = np.linspace(0.0, self.tau_half, table_nodes + 1)
        peak_segments = [
            self._quad(self._q, lo, hi) for lo, hi in zip(self.tau_nodes[:-1], self.tau_nodes[1:])
        ]
        self.x_peak = np.concatenate([[0.0], np.cumsum(peak_segments)])

        w_half = math.log(0.5 * a)
        w_min = w_half - math.sqrt(lam) * r_max - 1.0
        count = max(8, int(math.ceil((w_half - w_min) / 0.05)))
        self.w_nodes = np.linspace(w_half, w_min, count + 1)
        tail_segments = [
            self._quad(self._p, lo, hi) for hi, lo in zip(self.w_nodes[:-1], self.w_nodes[1:])
        ]
        self.x_tail = self.x_peak[-1] + np.concatenate([[0.0], np.cumsum(tail_segments)])

    @classmethod
    def _quad(cls, func: Callable, lo: float, hi: float, depth: int = 0) -> float:
        """Adaptive quadrature; halves the interval where QUADPACK reports trouble."""
        result = integrate.quad(
            lambda y: float(func(np.asarray(y))),
            lo,
            hi,
            epsabs=0.0,
            epsrel=1e-13,
            limit=QUAD_LIMIT,
            full_output=1,
        )
        value, abserr = result[0], result[1]
        # full_output adds a message as fourth entry when QUADPACK did not converge
        troubled = len(result) > 3 or abserr > QUAD_ACCEPT * abs(value)
        if troubled and depth < QUAD_MAX_SPLITS:
            mid = 0.5 * (lo + hi)
            return cls._quad(func, lo, mid, depth + 1) + cls._quad(func, mid, hi, depth + 1)
        return value

    def _q(self, tau):
        """dx/dτ = 2aτ/√F(a(1 - τ²)), regular at τ = 0."""
        a = self.a
        tau = np.asarray(tau, dtype=float)
        delta = a * tau * tau
        near = delta < NEAR_PEAK * a
        taylor = a * (-self._f1 + 0.5 * self._f2 * delta - self._f3 * delta * delta / 6.0)
        x = a - delta
        generic = x * x * _peak_function(x * x, self.prob) / np.where(near, 1.0, tau * tau)
        ratio = np.where(near, taylor, generic)
        return 2.0 * a / np.sqrt(ratio)

    def _p(self, w):
        """-dx/dw = z/√F(z) at z = e^w."""
        return 1.0 / np.sqrt(_peak_function(np.exp(2.0 * np.asarray(w, dtype=float)), self.prob))

    @staticmethod
    def _gl(func: Callable, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        pts = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        return half * (func(pts) @ _GL_WEIGHTS)

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        """u(r) at the given radii."""
        out = np.empty_like(r, dtype=float)
        in_peak = r <= self.x_peak[-1]
        m_peak = len(self.tau_nodes) - 2
        m_tail = len(self.w_nodes) - 2

        rp = r[in_peak]
        tau = np.interp(rp, self.x_peak, self.tau_nodes)
        for _ in range(4):
            j = np.clip(np.searchsorted(self.tau_nodes, tau, side="right") - 1, 0, m_peak)
            x_tau = self.x_peak[j] + self._gl(self._q, self.tau_nodes[j], tau)
            tau = np.clip(tau - (x_tau - rp) / self._q(tau), 0.0, self.tau_half)
        out[in_peak] = self.a * (1.0 - tau * tau)

        rt = r[~in_peak]
        beyond = rt > self.x_tail[-1]
        w = np.interp(rt, self.x_tail, self.w_nodes)
        for _ in range(4):
            j = np.clip(np.searchsorted(-self.w_nodes, -w, side="right") - 1, 0, m_tail)
            x_w = self.x_tail[j] + self._gl(self._p, w, self.w_nodes[j])
            w = np.clip(w + (x_w - rt) / self._p(w), self.w_nodes[-1], self.w_nodes[0])
        tail = np.exp(w)
        if np.any(beyond):
            rate = math.sqrt(self.prob.lam)
            tail[beyond] = math.exp(self.w_nodes[-1]) * np.exp(
                -rate * (rt[beyond] - self.x_tail[-1])
            )
        out[~in_peak] = tail
        return out


def ground_state_1d(
    prob: ScalarProblem, grid: RadialGrid, table_nodes: int = 400
) -> RadialProfile:
    """
    One-dimensional ground state by inverse quadrature.

    Args:
        prob: Scalar problem with n = 1
        grid: Radial grid
        table_nodes: Number of quadrature segments in the peak region

    Returns:
        Positive, strictly decreasing profile with value u_s(0) at r = 0
    """
    table = _InverseQuadrature(prob, grid.r_max, table_nodes)
    return RadialProfile(grid, table.evaluate(grid.nodes))


def _shoot(
    a: float,
    prob: ScalarProblem,
    r_end: float,
    rtol: float,
    atol: float,
    dense: bool = False,
):
    """Integrate the radial ODE from u(0) = a; classify the outcome."""
    lam, c, s, n = prob.lam, prob.coupling, prob.s, prob.n
    c2 = c * c

    def f(u):
        return c2 * u**3 / (1.0 + s * c * u * u)

    u2 = (lam * a - f(a)) / n
    if u2 >= 0.0:
        return UNDERSHOOT, None, 0.0

    r0 = min(1e-4 / math.sqrt(lam), 1e-3 * r_end)
    y0 = [a + 0.5 * u2 * r0 * r0, u2 * r0]

    def rhs(r, y):
        return [y[1], -(n - 1) / r * y[1] + lam * y[0] - f(y[0])]

    def crossed(r, y):
        return y[0]

    crossed.terminal = True
    crossed.direction = -1

    def turned(r, y):
        return y[1]

    turned.terminal = True
    turned.direction = 1

    sol = integrate.solve_ivp(
        rhs,
        (r0, r_end),
        y0,
        method="DOP853",
        rtol=rtol,
        atol=atol,
        events=(crossed, turned),
        dense_output=dense,
    )
    if sol.t_events[0].size:
        return OVERSHOOT, sol, r0
    if sol.t_events[1].size:
        return UNDERSHOOT, sol, r0
    u, du = sol.y[:, -1]
    # sign of the growing mode e^{√λ r}
    outcome = UNDERSHOOT if du + math.sqrt(lam) * u > 0 else OVERSHOOT
    return outcome, sol, r0


def shooting_amplitude(
    prob: ScalarProblem,
    r_end: float,
    tol: float = 1e-12,
    rtol: float = 1e-11,
    atol: float = 1e-13,
    bracket: Optional[Tuple[float, float]] = None,
) -> float:
    """
    u(0) of the radial ground state by bisection between undershoot and overshoot.

    Args:
        prob: Scalar problem with n in {2, 3}
        r_end: Integration range
        tol: Relative width at which bisection stops
        rtol: ODE relative tolerance
        atol: ODE absolute tolerance
        bracket: Optional (undershoot, overshoot) starting values

    Returns:
        Shooting value u(0)

    Raises:
        BracketNotFoundError: If no undershoot/overshoot pair is found
    """
    lam, c, s = prob.lam, prob.coupling, prob.s

    def classify(a: float) -> str:
        return _shoot(a, prob, r_end, rtol, atol)[0]

    if bracket is not None:
        lo, hi = bracket
        if classify(lo) != UNDERSHOOT or classify(hi) != OVERSHOOT:
            raise BracketNotFoundError("supplied bracket does not enclose u(0)", (lo, hi))
    else:
        # f(b)/b = λ: every a <= b undershoots immediately
        b = math.sqrt(lam / (c * c - s * c * lam))
        lo, hi = b, 2.0 * b
        doublings = 0
        while classify(hi) == UNDERSHOOT:
            lo, hi = hi, 2.0 * hi
            doublings += 1
            if doublings > 60:
                raise BracketNotFoundError("no overshooting u(0) found", (b, hi))

    for _ in range(200):
        if hi - lo <= tol * hi:
            break
        mid = 0.5 * (lo + hi)
        if classify(mid) == UNDERSHOOT:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bessel_tail(r: np.ndarray, r_c: float, u_c: float, lam: float, n: int) -> np.ndarray:
    """Decaying solution r^{1-n/2} K_{n/2-1}(√λ r) scaled to u_c at r_c."""
    nu = 0.5 * n - 1.0
    k = math.sqrt(lam)
    ratio = special.kve(nu, k * r) / special.kve(nu, k * r_c)
    return u_c * (r / r_c) ** (1.0 - 0.5 * n) * ratio * np.exp(-k * (r - r_c))


def ground_state_radial(
    prob: ScalarProblem,
    grid: RadialGrid,
    tol: float = 1e-12,
    rtol: float = 1e-11,
    atol: float = 1e-13,
    bracket: Optional[Tuple[float, float]] = None,
) -> RadialProfile:
    """
    Radial ground state in n = 2, 3 by shooting.

    Args:
        prob: Scalar problem with n in {2, 3}
        grid: Radial grid
        tol: Relative bisection tolerance on u(0)
        rtol: ODE relative tolerance
        atol: ODE absolute tolerance
        bracket: Optional (undershoot, overshoot) starting values

    Returns:
        Positive decreasing profile

    Raises:
        DomainError: If n is not 2 or 3
        ExistenceWindowError: If s is outside [0, c/λ)
        BracketNotFoundError: If shooting cannot bracket u(0)
    """
    if prob.n not in (2, 3):
        raise DomainError(f"ground_state_radial requires n in (2, 3), got n = {prob.n}")
    prob.require_window()

    a = shooting_amplitude(prob, grid.r_max, tol=tol, rtol=rtol, atol=atol, bracket=bracket)
    _, sol, r0 = _shoot(a, prob, grid.r_max, rtol, atol, dense=True)
    if sol is None:
        raise BracketNotFoundError("shooting value undershoots at r = 0", (a, a))

    r = grid.nodes
    r_stop = float(sol.t[-1])
    r_sampled = r[(r >= r0) & (r <= r_stop)]
    u_sampled = sol.sol(r_sampled)[0]
    below = np.nonzero(u_sampled < TAIL_MATCH_FRACTION * a)[0]
    if below.size:
        match = below[0]
    else:
        match = int(np.argmin(u_sampled))
    r_c = float(r_sampled[match])
    u_c = float(u_sampled[match])

    values = np.empty_like(r)
    lam, c, s, n = prob.lam, prob.coupling, prob.s, prob.n
    u2 = (lam * a - c * c * a**3 / (1.0 + s * c * a * a)) / n
    core = r < r0
    values[core] = a + 0.5 * u2 * r[core] ** 2
    body = (r >= r0) & (r <= r_c)
    values[body] = sol.sol(r[body])[0]
    outer = r > r_c
    values[outer] = _bessel_tail(r[outer], r_c, u_c, lam, n)
    return RadialProfile(grid, values)


def scaled_ground_state_s0(prob: ScalarProblem, grid: RadialGrid) -> RadialProfile:
    """
    Cubic ground state from the scaling law u_0(x) = (√λ/c)·ζ(√λ x).

    ζ solves -Δζ + ζ = ζ³; in n = 1 it is √2·sech, otherwise it is shot once
    on the stretched grid [0, √λ·r_max].

    Raises:
        DomainError: Unless s = 0
    """
    if prob.s != 0.0:
        raise DomainError("the scaling law holds only for s = 0")
    k = math.sqrt(prob.lam)
    if prob.n == 1:
        zeta = math.sqrt(2.0) / np.cosh(k * grid.nodes)
    else:
        unit = ScalarProblem(lam=1.0, coupling=1.0, s=0.0, n=prob.n)
        stretched = RadialGrid(r_max=k * grid.r_max, num_points=grid.num_points)
        zeta = ground_state_radial(unit, stretched).values
    return RadialProfile(grid, k / prob.coupling * zeta)


def polish_profile(
    profile: RadialProfile, prob: ScalarProblem, tol: float = 1e-11, max_iter: int = 30
) -> RadialProfile:
    """
    Newton refinement of a profile on the discretized scalar equation.

    The result is a zero of the discrete residual (up to the rounding floor)
    with u(r_max) = 0.

    Raises:
        ConvergenceError: If the residual does not drop below tolerance
    """
    grid = profile.grid
    op = radial_operator(grid, prob.n)
    laplacian = op.minus_laplacian_matrix()
    lam, c, s = prob.lam, prob.coupling, prob.s
    u = profile.values.copy()
    u[-1] = 0.0
    target = max(tol, residual_floor(grid, float(np.max(np.abs(u))), lam))

    norm = math.inf
    for iteration in range(max_iter + 1):
        res = op.minus_laplacian(u) + lam * u - scalar_nonlinearity(u, c, s)
        res[-1] = u[-1]
        norm = float(np.max(np.abs(res)))
        if norm <= target:
            return RadialProfile(grid, u)
        if iteration == max_iter:
            break
        diagonal = lam - scalar_nonlinearity_derivative(u, c, s)
        diagonal[-1] = 1.0
        jac = (laplacian + sparse.diags(diagonal)).tocsc()
        u = u - spsolve(jac, res)
    raise ConvergenceError("discrete ground state did not converge", norm, max_iter)


class GroundStateSolver:
    """
    Scalar ground-state solver with caching and structured logging.

    Dispatches to inverse quadrature (n = 1) or shooting (n = 2, 3) and
    provides the discrete ground state used by the spectral and
    continuation modules.
    """

    COMPONENT = "GroundStateSolver"

    def __init__(
        self,
        config: Optional[GroundStateConfig] = None,
        grid_config: Optional[GridConfig] = None,
        logger=None,
    ):
        """
        Initialize ground-state solver.

        Args:
            config: Ground-state solver settings
            grid_config: Grid settings (tail tolerance)
            logger: Optional LoggingManager instance
        """
        self.config = config or GroundStateConfig()
        self.grid_config = grid_config or GridConfig()
        self.logger = logger
        self._continuum: BoundedCache[RadialProfile] = BoundedCache(self.config.cache_size)
        self._discrete: BoundedCache[RadialProfile] = BoundedCache(self.config.cache_size)

    def peak_amplitude_1d(self, prob: ScalarProblem) -> float:
        """u_s(0) for n = 1."""
        return peak_amplitude_1d(prob, rtol=self.config.peak_rtol)

    def ground_state_1d(self, prob: ScalarProblem, grid: RadialGrid) -> RadialProfile:
        return ground_state_1d(prob, grid, table_nodes=self.config.table_nodes)

    def ground_state_radial(
        self,
        prob: ScalarProblem,
        grid: RadialGrid,
        bracket: Optional[Tuple[float, float]] = None,
    ) -> RadialProfile:
        return ground_state_radial(
            prob,
            grid,
            tol=self.config.shooting_tol,
            rtol=self.config.ode_rtol,
            atol=self.config.ode_atol,
            bracket=bracket,
        )

    def solve(self, prob: ScalarProblem, grid: RadialGrid) -> RadialProfile:
        """
        Continuum ground state sampled on the grid.

        Args:
            prob: Scalar problem
            grid: Radial grid

        Returns:
            Ground-state profile

        Raises:
            ExistenceWindowError: If s is outside the existence window
            SolverError: If the root or shooting bracket cannot be found
        """
        key = (prob, grid)
        if key in self._continuum:
            return self._continuum[key]

        try:
            if prob.n == 1:
                profile = self.ground_state_1d(prob, grid)
            else:
                profile = self.ground_state_radial(prob, grid)
        except SaturatedNLSError as e:
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="solve",
                    message=f"Ground state failed: {e}",
                    metadata={"lam": prob.lam, "coupling": prob.coupling, "s": prob.s, "n": prob.n},
                    exc_info=e,
                )
            raise

        self._check_tail(profile, prob)
        if self.logger:
            self.logger.info(
                component=self.COMPONENT,
                operation="solve",
                message=f"Ground state computed with u(0)={profile.value_at_origin:.10g}",
                metadata={
                    "lam": prob.lam,
                    "coupling": prob.coupling,
                    "s": prob.s,
                    "n": prob.n,
                    "peak": profile.value_at_origin,
                    "tail": profile.tail_value,
                },
            )
        self._continuum[key] = profile
        return profile

    def discrete(self, prob: ScalarProblem, grid: RadialGrid) -> RadialProfile:
        """
        Ground state of the discretized equation (exact zero of the residual).

        Raises:
            ConvergenceError: If the Newton polish fails
        """
        key = (prob, grid)
        if key in self._discrete:
            return self._discrete[key]
        profile = self.solve(prob, grid)
        try:
            polished = polish_profile(
                profile, prob, tol=self.config.polish_tol, max_iter=self.config.polish_max_iter
            )
        except ConvergenceError as e:
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="discrete",
                    message="Discrete polish of the ground state failed",
                    metadata={"s": prob.s, "residual": e.residual},
                    exc_info=e,
                )
            raise
        if self.logger:
            self.logger.debug(
                component=self.COMPONENT,
                operation="discrete",
                message="Discrete ground state polished",
                metadata={
                    "s": prob.s,
                    "max_change": float(np.max(np.abs(polished.values - profile.values))),
                },
            )
        self._discrete[key] = polished
        return polished

    def _check_tail(self, profile: RadialProfile, prob: ScalarProblem) -> None:
        """Warn when the truncation radius is too small for the decay."""
        if profile.is_decaying(self.grid_config.tail_tolerance):
            return
        try:
            rate: Optional[float] = decay_rate(profile, prob.n)
        except ValidationError:
            rate = None
        if self.logger:
            self.logger.warning(
                component=self.COMPONENT,
                operation="check_tail",
                message="Profile tail exceeds tolerance; increase r_max",
                metadata={
                    "tail": profile.tail_value,
                    "tolerance": self.grid_config.tail_tolerance,
                    "decay_rate": rate,
                    "expected_rate": math.sqrt(prob.lam),
                },
            )

    def clear_cache(self) -> None:
        self._continuum.clear()
        self._discrete.clear()
