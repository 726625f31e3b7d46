"""
Data models and type definitions for the saturated NLS toolkit.

This module defines the core data structures used throughout the toolkit:
physical parameters, radial grids and profiles, spectra, bifurcation points,
solution branches, energy reports and CLI run configurations.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.exceptions import DomainError, ExistenceWindowError, ValidationError

SUPPORTED_DIMENSIONS = (1, 2, 3)


class PositivityKind(Enum):
    """Outcome classes of the positivity constraint."""
    SYMMETRIC_FAMILY = "symmetric_family"
    BOUND = "bound"
    NO_POSITIVE = "no_positive"


class TerminationReason(Enum):
    """Reasons a continuation run stops."""
    MAX_STEPS = "max_steps"
    LEFT_WINDOW = "left_parameter_window"
    STEP_FAILURE = "step_failure"
    RETURNED_TO_SEMITRIVIAL = "returned_to_semitrivial"
    SEED_FAILURE = "seed_failure"


class Command(Enum):
    """CLI commands."""
    GROUND_STATE = "ground-state"
    SPECTRUM = "spectrum"
    EIGENCURVES = "eigencurves"
    BIFURCATION_POINTS = "bifurcation-points"
    CONTINUE_BRANCH = "continue-branch"
    VERIFY_GROUNDSTATE = "verify-groundstate"
    CHECK_CONDITIONS = "check-conditions"
    BOX_ORACLE = "box-oracle"


class OutputFormat(Enum):
    """Export formats."""
    CSV = "csv"
    JSON = "json"


@dataclass(frozen=True)
class ScalarProblem:
    """
    Scalar ground-state problem -Δu + λu = c²u³/(1 + s·c·u²).

    Attributes:
        lam: Potential constant λ
        coupling: Coupling constant (α for u_s, β for v_s)
        s: Saturation parameter
        n: Spatial dimension
    """
    lam: float
    coupling: float
    s: float = 0.0
    n: int = 1

    @property
    def s_star(self) -> float:
        """Right end of the existence window."""
        return self.coupling / self.lam

    def in_window(self) -> bool:
        return 0.0 <= self.s < self.s_star

    def require_window(self, label: str = "coupling/lambda") -> None:
        """Raise ExistenceWindowError unless 0 <= s < coupling/lambda."""
        if not self.in_window():
            raise ExistenceWindowError(self.s, self.s_star, label)

    def with_s(self, s: float) -> "ScalarProblem":
        return replace(self, s=s)


@dataclass(frozen=True)
class Params:
    """
    Physical constants of the saturated system plus the dimension.

    Attributes:
        lambda1: Potential constant of the u-equation
        lambda2: Potential constant of the v-equation
        alpha: Coupling of u
        beta: Coupling of v
        s: Saturation parameter (s = 0 is the cubic limit)
        n: Spatial dimension (1, 2 or 3)
    """
    lambda1: float
    lambda2: float
    alpha: float
    beta: float
    s: float = 0.0
    n: int = 1

    def __post_init__(self):
        for name in ("lambda1", "lambda2", "alpha", "beta"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be a positive finite number, got {value}")
        if not (math.isfinite(self.s) and self.s >= 0):
            raise DomainError(f"s must be nonnegative, got {self.s}")
        if self.n not in SUPPORTED_DIMENSIONS:
            raise DomainError(f"dimension n must be one of {SUPPORTED_DIMENSIONS}, got {self.n}")

    @property
    def s_star_u(self) -> float:
        """alpha/lambda1: u_s exists for s below this value."""
        return self.alpha / self.lambda1

    @property
    def s_star_v(self) -> float:
        """beta/lambda2: v_s exists for s below this value."""
        return self.beta / self.lambda2

    @property
    def lambda_ratio(self) -> float:
        return self.lambda2 / self.lambda1

    @property
    def coupling_ratio(self) -> float:
        return self.beta / self.alpha

    @property
    def omega(self) -> float:
        return math.sqrt(self.lambda2 / self.lambda1)

    @property
    def is_symmetric(self) -> bool:
        return self.alpha == self.beta and self.lambda1 == self.lambda2

    def with_s(self, s: float) -> "Params":
        return replace(self, s=s)

    def swapped(self) -> "Params":
        """Exchange the roles of the two equations."""
        return Params(
            lambda1=self.lambda2,
            lambda2=self.lambda1,
            alpha=self.beta,
            beta=self.alpha,
            s=self.s,
            n=self.n,
        )

    def scalar_u(self) -> ScalarProblem:
        return ScalarProblem(lam=self.lambda1, coupling=self.alpha, s=self.s, n=self.n)

    def scalar_v(self) -> ScalarProblem:
        return ScalarProblem(lam=self.lambda2, coupling=self.beta, s=self.s, n=self.n)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "alpha": self.alpha,
            "beta": self.beta,
            "s": self.s,
            "n": self.n,
        }


@dataclass(frozen=True)
class RadialGrid:
    """
    Uniform radial grid on [0, r_max].

    Attributes:
        r_max: Truncation radius (Dirichlet boundary)
        num_points: Number of nodes including both ends
    """
    r_max: float
    num_points: int

    def __post_init__(self):
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise ValidationError(f"r_max must be positive, got {self.r_max}")
        if self.num_points < 3:
            raise ValidationError(f"num_points must be >= 3, got {self.num_points}")

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.num_points)

    @property
    def h(self) -> float:
        return self.r_max / (self.num_points - 1)

    @staticmethod
    def min_r_max(params: Params, decay_margin: float) -> float:
        """Smallest truncation radius admitted by the decay margin."""
        return decay_margin / math.sqrt(min(params.lambda1, params.lambda2))

    @classmethod
    def for_params(
        cls, params: Params, num_points: int, decay_margin: float = 15.0
    ) -> "RadialGrid":
        return cls(r_max=cls.min_r_max(params, decay_margin), num_points=num_points)

    def refined(self) -> "RadialGrid":
        """Same r_max with the spacing halved."""
        return RadialGrid(r_max=self.r_max, num_points=2 * self.num_points - 1)


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """
    Radially symmetric function sampled on a RadialGrid.

    Attributes:
        grid: Grid the values live on
        values: One finite value per node
    """
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.num_points,):
            raise ValidationError(
                f"profile has shape {values.shape}, expected ({self.grid.num_points},)"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("profile contains non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "RadialProfile":
        return cls(grid, np.zeros(grid.num_points))

    @property
    def value_at_origin(self) -> float:
        return float(self.values[0])

    @property
    def tail_value(self) -> float:
        return float(abs(self.values[-1]))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_decaying(self, tail_tolerance: float) -> bool:
        return self.tail_value <= tail_tolerance

    def scaled(self, factor: float) -> "RadialProfile":
        return RadialProfile(self.grid, factor * self.values)


@dataclass(frozen=True, eq=False)
class StatePair:
    """
    Pair (u, v) of radial profiles on one grid.

    Attributes:
        u: First component
        v: Second component
    """
    u: RadialProfile
    v: RadialProfile

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise ValidationError("state components must share one grid")

    @property
    def grid(self) -> RadialGrid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: RadialGrid) -> "StatePair":
        return cls(RadialProfile.zeros(grid), RadialProfile.zeros(grid))

    @classmethod
    def semitrivial(cls, us: RadialProfile) -> "StatePair":
        """(u_s, 0)."""
        return cls(us, RadialProfile.zeros(us.grid))

    @classmethod
    def from_vector(cls, grid: RadialGrid, x: np.ndarray) -> "StatePair":
        m = grid.num_points
        return cls(RadialProfile(grid, x[:m]), RadialProfile(grid, x[m:]))

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.u.values, self.v.values])

    def scaled(self, factor: float) -> "StatePair":
        return StatePair(self.u.scaled(factor), self.v.scaled(factor))


@dataclass(frozen=True, eq=False)
class Potential:
    """
    Nonnegative radial potential W on a grid.

    Attributes:
        grid: Grid the values live on
        values: Nonnegative value per node
    """
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.num_points,):
            raise ValidationError(
                f"potential has shape {values.shape}, expected ({self.grid.num_points},)"
            )
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValidationError("potential values must be finite and nonnegative")
        object.__setattr__(self, "values", values)

    def scaled(self, factor: float) -> "Potential":
        return Potential(self.grid, factor * self.values)


@dataclass
class Spectrum:
    """
    Largest eigenvalues of L = (-Δ + λ)^{-1}(W ·) with eigenfunctions.

    Attributes:
        eigenvalues: Strictly decreasing positive eigenvalues μ₀ > μ₁ > ...
        eigenfunctions: Matching profiles, sup-normalized, positive at r = 0
        requested: Number of eigenvalues asked for
        truncated: True when fewer than requested positive eigenvalues exist
    """
    eigenvalues: np.ndarray
    eigenfunctions: List[RadialProfile]
    requested: int
    truncated: bool = False

    @property
    def count(self) -> int:
        return int(len(self.eigenvalues))


@dataclass
class EigenCurves:
    """
    Eigenvalue curves μ_k(s) sampled on an s-grid.

    Attributes:
        s_values: Sample points in s
        mu: Array of shape (len(s_values), k_max); NaN where μ_k is unavailable
        params: Parameters (their s field is ignored)
    """
    s_values: np.ndarray
    mu: np.ndarray
    params: Params

    @property
    def k_max(self) -> int:
        return int(self.mu.shape[1])


@dataclass(frozen=True)
class NodalCount:
    """
    Sign-change count of a profile.

    Attributes:
        count: Number of strict sign changes above the tail threshold
        effectively_zero: True when every value is below the threshold
    """
    count: int
    effectively_zero: bool = False


@dataclass
class NondegeneracyReport:
    """
    Spectrum of the u-block linearization at u_s.

    Attributes:
        eigenvalues: Largest eigenvalues of (-Δ + λ)^{-1}(f'(u_s) ·)
        distance_from_one: min |μ - 1| over the computed eigenvalues
        morse_index: Number of eigenvalues above 1
        nondegenerate: True when 1 is not (numerically) an eigenvalue
    """
    eigenvalues: np.ndarray
    distance_from_one: float
    morse_index: int
    nondegenerate: bool


@dataclass
class BifurcationPoint:
    """
    Root s_k of μ_k(s) = 1 on the semitrivial branch.

    Attributes:
        k: Eigenvalue index
        s_k: Bifurcation parameter
        kernel_fn: Eigenfunction of L(s_k) at eigenvalue 1
        bracket: (s_lo, s_hi) on which μ_k - 1 changes sign
        mu_residual: |μ_k(s_k) - 1|
    """
    k: int
    s_k: float
    kernel_fn: RadialProfile
    bracket: Tuple[float, float]
    mu_residual: float = 0.0


@dataclass
class BifurcationSearch:
    """
    Result of a bifurcation scan.

    Attributes:
        points: Detected bifurcation points ordered by (k, s_k)
        no_crossing: Indices k whose curve never crossed 1 on the grid
        curves: Eigenvalue curves used for the scan
    """
    points: List[BifurcationPoint]
    no_crossing: List[int]
    curves: EigenCurves


@dataclass(frozen=True)
class PositivityVerdict:
    """
    Constraint on positive fully nontrivial solutions.

    Attributes:
        kind: Verdict class
        bound: (α-β)/(λ₁-λ₂) for the BOUND verdict
    """
    kind: PositivityKind
    bound: Optional[float] = None


@dataclass
class BranchPoint:
    """
    One converged point on a continuation branch.

    Attributes:
        step: Index along the branch
        state: Solution (u, v)
        s: Saturation parameter
        residual_norm: Sup-norm of the discrete residual
        energy: I_s(u, v)
        nodal_type: (zeros of u, zeros of v)
        min_values: (min u, min v)
        norms: (‖u‖_{λ₁}, ‖v‖_{λ₂})
    """
    step: int
    state: StatePair
    s: float
    residual_norm: float
    energy: float
    nodal_type: Tuple[int, int]
    min_values: Tuple[float, float]
    norms: Tuple[float, float]

    @property
    def is_positive(self) -> bool:
        return self.min_values[0] > 0 and self.min_values[1] > 0


@dataclass
class Branch:
    """
    Solution branch C_k traced from a bifurcation point.

    Attributes:
        k: Originating eigenvalue index
        origin: Bifurcation point the branch emanates from
        params: Parameters (s is the continuation variable)
        direction: +1 or -1 (sign of the seed amplitude)
        points: Converged points in step order
        termination: Why continuation stopped
        message: Human-readable termination detail
    """
    k: int
    origin: BifurcationPoint
    params: Params
    direction: int = 1
    points: List[BranchPoint] = field(default_factory=list)
    termination: Optional[TerminationReason] = None
    message: str = ""

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class FiberingResult:
    """
    Maximizer of the fibering map r -> I_s(√r u, √r v).

    Attributes:
        bounded: False when the supremum is +inf
        r_star: Unique maximizer, None when unbounded
        sup_value: Maximum value, +inf when unbounded
    """
    bounded: bool
    r_star: Optional[float]
    sup_value: float


@dataclass
class SemitrivialLevels:
    """
    Energies of the semitrivial solutions at one s.

    Attributes:
        level_u: I_s(u_s, 0) or None when u_s does not exist
        level_v: I_s(0, v_s) or None when v_s does not exist
        c_s_star: Minimum of the available levels
    """
    level_u: Optional[float]
    level_v: Optional[float]
    c_s_star: float


@dataclass
class EnergyCandidate:
    """
    Fully nontrivial branch point compared with the semitrivial level.

    Attributes:
        source: Branch point identifier "k<k>:<direction>:<step>"
        s: Saturation parameter of the point
        energy: I_s at the point
        c_s_star: Semitrivial level at the same s
        margin: energy - c_s_star
    """
    source: str
    s: float
    energy: float
    c_s_star: float
    margin: float


@dataclass
class EnergyReport:
    """
    Result of the semitrivial ground-state verification.

    Attributes:
        c_s_star: Minimum semitrivial level at the reference s
        candidates: Every fully nontrivial branch point checked
        violations: Candidates with margin < -tolerance
        tolerance: Absolute tolerance used
        symmetric_case: True for α = β and λ₁ = λ₂
        level_u: I_s(u_s, 0) at the reference s
        level_v: I_s(0, v_s) at the reference s
        theta_energy_spread: max - min energy over the (cos θ u_s, sin θ u_s) family
    """
    c_s_star: float
    candidates: List[EnergyCandidate] = field(default_factory=list)
    violations: List[EnergyCandidate] = field(default_factory=list)
    tolerance: float = 0.0
    symmetric_case: bool = False
    level_u: Optional[float] = None
    level_v: Optional[float] = None
    theta_energy_spread: Optional[float] = None


@dataclass(frozen=True)
class SweepSpec:
    """
    Log-spaced s-sweep.

    Attributes:
        s_min: First s value
        s_max: Last s value
        count: Number of samples
    """
    s_min: float
    s_max: float
    count: int

    def values(self) -> np.ndarray:
        if not 0 < self.s_min < self.s_max:
            raise DomainError(f"sweep needs 0 < smin < smax, got {self.s_min}, {self.s_max}")
        if self.count < 2:
            raise DomainError(f"sweep needs at least 2 samples, got {self.count}")
        return np.geomspace(self.s_min, self.s_max, self.count)


@dataclass
class RunConfig:
    """
    One CLI invocation.

    Attributes:
        command: Command to dispatch
        params: Physical parameters
        r_max: Truncation radius; None derives it from the decay margin
        num_points: Grid size; None uses the configured default
        k_max: Number of eigenvalues / branches considered
        sweep: Optional s-sweep
        tol: Optional tolerance override for bifurcation refinement
        output_path: Output file (relative to output.output_dir); None writes to stdout
        format: Export format; None uses output.format from the settings
        k: Branch index for continue-branch
        direction: Seed direction for continue-branch
        steps: Optional max_steps override
        kappa: Box height for box-oracle
        eps: Box parameter for box-oracle
        settings_path: Toolkit YAML settings
    """
    command: Command
    params: Params
    r_max: Optional[float] = None
    num_points: Optional[int] = None
    k_max: Optional[int] = None
    sweep: Optional[SweepSpec] = None
    tol: Optional[float] = None
    output_path: Optional[str] = None
    format: Optional[OutputFormat] = None
    k: int = 0
    direction: int = 1
    steps: Optional[int] = None
    kappa: float = 1.0
    eps: float = 0.05
    settings_path: Optional[str] = None
