"""
Newton solver and pseudo-arclength continuation for the coupled system.

The unknown is the stacked vector x = [u, v] on the radial grid; s is the
continuation parameter. Branch points are tracked in the inner product
⟨(x, s), (y, t)⟩ = ∫(x₁y₁ + x₂y₂) + s·t, using the grid quadrature weights.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from src.bifurcation import count_nodes
from src.config import ContinuationConfig
from src.core.discretization import radial_operator
from src.core.model import intensity_values, residual_floor, residual_vector
from src.energy import energy_Is
from src.exceptions import ConvergenceError, SingularJacobianError, SolverError
from src.ground_state import GroundStateSolver
from src.models import (
    BifurcationPoint,
    Branch,
    BranchPoint,
    Params,
    RadialGrid,
    StatePair,
    TerminationReason,
)


@dataclass
class NewtonOutcome:
    """
    Converged Newton solve.

    Attributes:
        state: Solution
        s: Parameter value (changes only in augmented solves)
        iterations: Newton iterations used
        residual_norm: Final residual sup-norm
    """
    state: StatePair
    s: float
    iterations: int
    residual_norm: float


def jacobian_matrix(
    x: np.ndarray, grid: RadialGrid, params: Params, s: Optional[float] = None
) -> sparse.csc_matrix:
    """
    Jacobian of residual_vector with respect to x = [u, v].

    Pointwise blocks, with D = (1 + sZ)²:
        J_uu = -Δ + λ₁ - (sαZ² + 3α²u² + αβv²)/D
        J_vv = -Δ + λ₂ - (sβZ² + αβu² + 3β²v²)/D
        J_uv = J_vu = -2αβuv/D
    The Dirichlet rows are identity rows.
    """
    s = params.s if s is None else s
    m = grid.num_points
    u, v = x[:m], x[m:]
    a, b = params.alpha, params.beta
    z = intensity_values(u, v, a, b)
    denom = (1.0 + s * z) ** 2
    lap = radial_operator(grid, params.n).minus_laplacian_matrix()

    d11 = params.lambda1 - (s * a * z * z + 3.0 * a * a * u * u + a * b * v * v) / denom
    d22 = params.lambda2 - (s * b * z * z + a * b * u * u + 3.0 * b * b * v * v) / denom
    off = -2.0 * a * b * u * v / denom
    d11[-1] = 1.0
    d22[-1] = 1.0
    off[-1] = 0.0
    return sparse.bmat(
        [
            [lap + sparse.diags(d11), sparse.diags(off)],
            [sparse.diags(off), lap + sparse.diags(d22)],
        ],
        format="csc",
    )


def jacobian(state: StatePair, params: Params) -> sparse.csc_matrix:
    """Jacobian of the discrete residual at a state, s = params.s."""
    return jacobian_matrix(state.as_vector(), state.grid, params)


def residual_s_derivative(
    x: np.ndarray, grid: RadialGrid, params: Params, s: float
) -> np.ndarray:
    """∂R/∂s = (αuZ²/(1 + sZ)², βvZ²/(1 + sZ)²), zero on the Dirichlet rows."""
    m = grid.num_points
    u, v = x[:m], x[m:]
    z = intensity_values(u, v, params.alpha, params.beta)
    q = z * z / (1.0 + s * z) ** 2
    du = params.alpha * u * q
    dv = params.beta * v * q
    du[-1] = 0.0
    dv[-1] = 0.0
    return np.concatenate([du, dv])


def effective_tolerance(tol: float, grid: RadialGrid, x: np.ndarray, params: Params) -> float:
    """newton_tol, raised to the rounding floor of the residual when that is larger."""
    scale = float(np.max(np.abs(x))) if x.size else 0.0
    return max(tol, residual_floor(grid, scale, max(params.lambda1, params.lambda2)))


def solution_norms(state: StatePair, params: Params) -> Tuple[float, float]:
    """(‖u‖_{λ₁}, ‖v‖_{λ₂}) with ‖u‖²_λ = ∫|∇u|² + λu²."""
    op = radial_operator(state.grid, params.n)
    return (
        math.sqrt(op.lambda_norm_squared(state.u.values, params.lambda1)),
        math.sqrt(op.lambda_norm_squared(state.v.values, params.lambda2)),
    )


def _sup(values: np.ndarray) -> float:
    return float(np.max(np.abs(values)))


def _check_saturation(x: np.ndarray, grid: RadialGrid, params: Params, s: float) -> None:
    z = intensity_values(x[: grid.num_points], x[grid.num_points :], params.alpha, params.beta)
    if not np.all(np.isfinite(x)) or 1.0 + s * float(np.max(z)) <= 0.0:
        raise ConvergenceError("Newton iterate left the admissible region", math.inf, 0)


def _solve_linear(jac: sparse.csc_matrix, rhs: np.ndarray) -> np.ndarray:
    try:
        out = splu(jac).solve(rhs)
    except RuntimeError as e:
        raise SingularJacobianError("singular Jacobian (near bifurcation)") from e
    if not np.all(np.isfinite(out)):
        raise SingularJacobianError("singular Jacobian (near bifurcation)")
    return out


def _bordered_solve(
    jac: sparse.csc_matrix,
    column: np.ndarray,
    row: np.ndarray,
    corner: float,
    rhs: np.ndarray,
    rhs_extra: float,
) -> Tuple[np.ndarray, float]:
    """
    Solve [[J, column], [rowᵀ, corner]]·[dx; ds] = [rhs; rhs_extra].

    Block elimination with one factorization of J plus one step of
    iterative refinement; falls back to factorizing the full bordered matrix
    when J is singular or the Schur complement vanishes.
    """
    try:
        lu = splu(jac)
    except RuntimeError:
        lu = None

    if lu is not None:
        b = lu.solve(column)
        rb = float(row @ b)
        denom = corner - rb
        if np.all(np.isfinite(b)) and abs(denom) > 1e-10 * (abs(corner) + abs(rb)):

            def eliminate(r: np.ndarray, g: float) -> Tuple[np.ndarray, float]:
                a = lu.solve(r)
                ds = (g - float(row @ a)) / denom
                return a - ds * b, ds

            dx, ds = eliminate(rhs, rhs_extra)
            fix_x, fix_s = eliminate(
                rhs - jac @ dx - ds * column, rhs_extra - float(row @ dx) - corner * ds
            )
            dx, ds = dx + fix_x, ds + fix_s
            if np.all(np.isfinite(dx)) and math.isfinite(ds):
                return dx, ds

    full = sparse.bmat(
        [
            [jac, sparse.csc_matrix(column.reshape(-1, 1))],
            [sparse.csc_matrix(row.reshape(1, -1)), sparse.csc_matrix([[corner]])],
        ],
        format="csc",
    )
    out = _solve_linear(full, np.append(rhs, rhs_extra))
    return out[:-1], float(out[-1])


def _newton(
    x0: np.ndarray,
    s: float,
    grid: RadialGrid,
    params: Params,
    tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, int, float]:
    """Damped Newton at fixed s; returns (x, iterations, residual sup-norm)."""
    x = x0.copy()
    res = residual_vector(x, grid, params, s)
    norm = _sup(res)
    for iteration in range(max_iter + 1):
        if norm <= effective_tolerance(tol, grid, x, params):
            return x, iteration, norm
        if iteration == max_iter:
            break
        dx = _solve_linear(jacobian_matrix(x, grid, params, s), res)
        damping = 1.0
        while True:
            trial = x - damping * dx
            trial_res = residual_vector(trial, grid, params, s)
            trial_norm = _sup(trial_res)
            if trial_norm < (1.0 - 1e-4 * damping) * norm or damping < 1.0 / 64.0:
                break
            damping *= 0.5
        x, res, norm = trial, trial_res, trial_norm
        if not np.isfinite(norm):
            break
    raise ConvergenceError("Newton iteration did not converge", norm, max_iter)


def _augmented_newton(
    x0: np.ndarray,
    s0: float,
    row: np.ndarray,
    corner: float,
    target: float,
    grid: RadialGrid,
    params: Params,
    tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, float, int, float]:
    """Newton on R(x, s) = 0 together with row·x + corner·s = target."""
    x, s = x0.copy(), s0
    norm = math.inf
    for iteration in range(max_iter + 1):
        _check_saturation(x, grid, params, s)
        res = residual_vector(x, grid, params, s)
        norm = _sup(res)
        gap = float(row @ x) + corner * s - target
        if norm <= effective_tolerance(tol, grid, x, params) and abs(gap) <= 1e-10 * (
            1.0 + abs(target)
        ):
            return x, s, iteration, norm
        if iteration == max_iter:
            break
        dx, ds = _bordered_solve(
            jacobian_matrix(x, grid, params, s),
            residual_s_derivative(x, grid, params, s),
            row,
            corner,
            res,
            gap,
        )
        x = x - dx
        s = s - ds
    raise ConvergenceError("corrector did not converge", norm, max_iter)


def newton_solve(
    initial: StatePair,
    s: float,
    params: Params,
    cfg: Optional[ContinuationConfig] = None,
) -> StatePair:
    """
    Solve the discretized system at fixed s from an initial guess.

    Args:
        initial: Starting state
        s: Saturation parameter
        params: Physical constants (params.s is ignored)
        cfg: Newton tolerance and iteration cap

    Returns:
        State with residual sup-norm below the (floor-adjusted) tolerance

    Raises:
        ConvergenceError: If the iteration cap is reached
        SingularJacobianError: If a Newton matrix is singular
    """
    cfg = cfg or ContinuationConfig()
    grid = initial.grid
    x, _, _ = _newton(
        initial.as_vector(), s, grid, params, cfg.newton_tol, cfg.newton_max_iter
    )
    return StatePair.from_vector(grid, x)


class BranchContinuer:
    """
    Traces the branch C_k bifurcating from (u_{s_k}, 0).

    The seed fixes the projection of v on the kernel function and lets s
    float; later points use pseudo-arclength steps with adaptive length.
    """

    COMPONENT = "BranchContinuer"

    def __init__(
        self,
        ground_state: Optional[GroundStateSolver] = None,
        config: Optional[ContinuationConfig] = None,
        tail_threshold: float = 1e-6,
        logger=None,
    ):
        """
        Initialize branch continuer.

        Args:
            ground_state: Solver for the discrete u_{s_k}
            config: Newton and continuation settings
            tail_threshold: Relative threshold for nodal counts
            logger: Optional LoggingManager instance
        """
        self.ground_state = ground_state or GroundStateSolver(logger=logger)
        self.config = config or ContinuationConfig()
        self.tail_threshold = tail_threshold
        self.logger = logger

    def newton(self, initial: StatePair, s: float, params: Params) -> NewtonOutcome:
        """Newton solve at fixed s with iteration count and residual."""
        try:
            x, iterations, norm = _newton(
                initial.as_vector(),
                s,
                initial.grid,
                params,
                self.config.newton_tol,
                self.config.newton_max_iter,
            )
        except SolverError as e:
            if self.logger:
                self.logger.log_error(self.COMPONENT, "newton", e, {"s": s})
            raise
        return NewtonOutcome(StatePair.from_vector(initial.grid, x), s, iterations, norm)

    def _weights(self, grid: RadialGrid, params: Params) -> np.ndarray:
        op = radial_operator(grid, params.n)
        w = op.area * op.volumes
        return np.concatenate([w, w])

    def _tangent(
        self,
        x: np.ndarray,
        s: float,
        previous: Tuple[np.ndarray, float],
        weights: np.ndarray,
        grid: RadialGrid,
        params: Params,
    ) -> Tuple[np.ndarray, float]:
        """Unit tangent oriented along the previous one."""
        prev_x, prev_s = previous
        tx, ts = _bordered_solve(
            jacobian_matrix(x, grid, params, s),
            residual_s_derivative(x, grid, params, s),
            weights * prev_x,
            prev_s,
            np.zeros_like(x),
            1.0,
        )
        length = math.sqrt(float(np.dot(weights * tx, tx)) + ts * ts)
        return tx / length, ts / length

    def _point(
        self, step: int, x: np.ndarray, s: float, norm: float, grid: RadialGrid, params: Params
    ) -> BranchPoint:
        state = StatePair.from_vector(grid, x)
        return BranchPoint(
            step=step,
            state=state,
            s=s,
            residual_norm=norm,
            energy=energy_Is(state, s, params),
            nodal_type=(
                count_nodes(state.u, self.tail_threshold),
                count_nodes(state.v, self.tail_threshold),
            ),
            # the Dirichlet node is zero by construction
            min_values=(float(np.min(state.u.values[:-1])), float(np.min(state.v.values[:-1]))),
            norms=solution_norms(state, params),
        )

    def _finish(self, branch: Branch, reason: TerminationReason, message: str) -> Branch:
        branch.termination = reason
        branch.message = message
        if self.logger:
            self.logger.info(
                component=self.COMPONENT,
                operation="continue_branch",
                message=f"Branch k={branch.k} stopped: {message}",
                metadata={
                    "k": branch.k,
                    "direction": branch.direction,
                    "points": len(branch.points),
                    "termination": reason.value,
                    "s_last": branch.points[-1].s if branch.points else None,
                },
            )
        return branch

    def continue_branch(
        self, origin: BifurcationPoint, params: Params, direction: int = 1
    ) -> Branch:
        """
        Trace the branch emanating from a bifurcation point.

        Args:
            origin: Bifurcation point (s_k, kernel function)
            params: Physical constants (params.s is ignored)
            direction: +1 or -1, the sign of the seed amplitude

        Returns:
            Branch with its termination reason; empty on seed failure
        """
        if direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {direction}")
        cfg = self.config
        grid = origin.kernel_fn.grid
        branch = Branch(k=origin.k, origin=origin, params=params, direction=direction)
        weights = self._weights(grid, params)
        m = grid.num_points

        us = self.ground_state.discrete(params.with_s(origin.s_k).scalar_u(), grid)
        amplitude = cfg.initial_amplitude or cfg.amplitude_factor * us.sup_norm()
        phi = origin.kernel_fn.values
        phi_hat = phi / math.sqrt(float(np.dot(weights[m:] * phi, phi)))
        seed_dir = np.concatenate([np.zeros(m), direction * phi_hat])
        x_seed = np.concatenate([us.values, direction * amplitude * phi])

        try:
            row = weights * seed_dir
            x, s, iterations, norm = _augmented_newton(
                x_seed,
                origin.s_k,
                row,
                0.0,
                float(row @ x_seed),
                grid,
                params,
                cfg.newton_tol,
                cfg.newton_max_iter,
            )
            tangent = self._tangent(x, s, (seed_dir, 0.0), weights, grid, params)
        except SolverError as e:
            if self.logger:
                self.logger.log_error(
                    self.COMPONENT, "continue_branch", e, {"k": origin.k, "s_k": origin.s_k}
                )
            return self._finish(branch, TerminationReason.SEED_FAILURE, f"seed failed: {e}")

        branch.points.append(self._point(0, x, s, norm, grid, params))
        step = min(cfg.step, cfg.step_max)
        easy = 0

        while len(branch.points) < cfg.max_steps:
            retries = 0
            while True:
                tx, ts = tangent
                row = weights * tx
                target = float(row @ x) + ts * s + step
                try:
                    x_new, s_new, iterations, norm = _augmented_newton(
                        x + step * tx,
                        s + step * ts,
                        row,
                        ts,
                        target,
                        grid,
                        params,
                        cfg.newton_tol,
                        cfg.newton_max_iter,
                    )
                    new_tangent = self._tangent(x_new, s_new, tangent, weights, grid, params)
                    break
                except SolverError as e:
                    step *= 0.5
                    retries += 1
                    if self.logger:
                        self.logger.debug(
                            component=self.COMPONENT,
                            operation="continue_branch",
                            message="Corrector failed; halving step",
                            metadata={"step": step, "retries": retries, "error": str(e)},
                        )
                    if step < cfg.step_min or retries > cfg.max_retries:
                        return self._finish(
                            branch,
                            TerminationReason.STEP_FAILURE,
                            f"corrector failed at s={s:.10g} after {retries} retries",
                        )

            if not 0.0 < s_new < params.s_star_u:
                return self._finish(
                    branch,
                    TerminationReason.LEFT_WINDOW,
                    f"s={s_new:.10g} left (0, alpha/lambda1)",
                )

            x, s, tangent = x_new, s_new, new_tangent
            branch.points.append(self._point(len(branch.points), x, s, norm, grid, params))

            if _sup(x[m:]) < cfg.semitrivial_factor * cfg.newton_tol:
                return self._finish(
                    branch,
                    TerminationReason.RETURNED_TO_SEMITRIVIAL,
                    f"v vanished at s={s:.10g}",
                )

            easy = easy + 1 if iterations <= cfg.easy_iterations else 0
            if easy >= 3:
                step = min(2.0 * step, cfg.step_max)
                easy = 0

        return self._finish(
            branch, TerminationReason.MAX_STEPS, f"reached max_steps={cfg.max_steps}"
        )


def continue_branch(
    origin: BifurcationPoint,
    params: Params,
    cfg: Optional[ContinuationConfig] = None,
    direction: int = 1,
    solver: Optional[GroundStateSolver] = None,
) -> Branch:
    """Trace C_k from `origin`; see BranchContinuer.continue_branch."""
    continuer = BranchContinuer(ground_state=solver, config=cfg)
    return continuer.continue_branch(origin, params, direction=direction)
