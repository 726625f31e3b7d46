"""
Configuration management module for the saturated NLS toolkit.

This module loads solver, output and logging settings from config.yaml and
environment variables, validates them, and provides a centralized
configuration object.
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from src.exceptions import ConfigurationError

DEFAULT_CONFIG_PATH = "config/config.yaml"


@dataclass
class GridConfig:
    """Configuration for the truncated radial grid."""
    decay_margin: float = 15.0
    num_points: int = 4001
    tail_tolerance: float = 1e-6


@dataclass
class GroundStateConfig:
    """Configuration for the scalar ground-state solvers."""
    peak_rtol: float = 1e-12
    shooting_tol: float = 1e-12
    ode_rtol: float = 1e-11
    ode_atol: float = 1e-13
    polish_tol: float = 1e-11
    polish_max_iter: int = 30
    table_nodes: int = 400
    cache_size: int = 128


@dataclass
class SpectrumConfig:
    """Configuration for eigenvalue computations."""
    k_max: int = 6
    end_margin: float = 0.01


@dataclass
class BifurcationConfig:
    """Configuration for the bifurcation-point search."""
    s_count: int = 200
    s_min_fraction: float = 0.01
    s_max_fraction: float = 0.99
    tol: float = 1e-8
    tail_threshold: float = 1e-6


@dataclass
class ContinuationConfig:
    """
    Configuration for Newton solves and pseudo-arclength continuation.

    Attributes:
        initial_amplitude: Seed amplitude of the kernel function; None means
            amplitude_factor * sup|u_{s_k}|
        step: Initial arclength step
        max_steps: Maximum number of branch points
        newton_tol: Residual sup-norm accepted as converged
        newton_max_iter: Newton iteration cap per solve
        amplitude_factor: Relative seed amplitude used when initial_amplitude is None
        step_min: Lower arclength step bound
        step_max: Upper arclength step bound
        semitrivial_factor: Branch stops once sup|v| < semitrivial_factor * newton_tol
        easy_iterations: Newton iterations counted as an easy step
        max_retries: Step halvings tried before giving up
    """
    initial_amplitude: Optional[float] = None
    step: float = 0.01
    max_steps: int = 200
    newton_tol: float = 1e-9
    newton_max_iter: int = 20
    amplitude_factor: float = 1e-3
    step_min: float = 1e-4
    step_max: float = 0.05
    semitrivial_factor: float = 10.0
    easy_iterations: int = 3
    max_retries: int = 8


@dataclass
class EnergyConfig:
    """Configuration for energy checks."""
    tolerance_factor: float = 1e-4
    theta_count: int = 16
    cache_size: int = 64


@dataclass
class OutputConfig:
    """Configuration for exported files."""
    format: str = "csv"
    significant_digits: int = 17
    output_dir: str = "./output"


@dataclass
class LoggingConfig:
    """Configuration for logging system."""
    level: str = "INFO"
    format: str = "json"
    console_output: bool = True
    file_output: bool = False
    log_dir: str = "logs"
    max_file_size_mb: int = 10
    backup_count: int = 5


@dataclass
class Config:
    """
    Main configuration object for the toolkit.

    Attributes:
        grid: Radial grid configuration
        ground_state: Scalar ground-state solver configuration
        spectrum: Eigenvalue configuration
        bifurcation: Bifurcation search configuration
        continuation: Newton and continuation configuration
        energy: Energy check configuration
        output: Export configuration
        logging: Logging configuration
    """
    grid: GridConfig = field(default_factory=GridConfig)
    ground_state: GroundStateConfig = field(default_factory=GroundStateConfig)
    spectrum: SpectrumConfig = field(default_factory=SpectrumConfig)
    bifurcation: BifurcationConfig = field(default_factory=BifurcationConfig)
    continuation: ContinuationConfig = field(default_factory=ContinuationConfig)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)


def default_config() -> Config:
    """Return a Config populated with built-in defaults."""
    return Config()


def _section(section_cls, values: Optional[Dict[str, Any]]):
    """Build one config section, rejecting unknown keys."""
    values = values or {}
    known = set(section_cls.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise ConfigurationError(
            f"Unknown keys in {section_cls.__name__}: {', '.join(sorted(unknown))}"
        )
    return section_cls(**values)


def load_config(config_path: str = DEFAULT_CONFIG_PATH) -> Config:
    """
    Load configuration from YAML file and environment variables.

    Args:
        config_path: Path to configuration YAML file

    Returns:
        Config object with all configuration values

    Raises:
        ConfigurationError: If configuration is invalid or missing
    """
    try:
        with open(config_path, "r") as f:
            yaml_config = yaml.safe_load(f) or {}
    except FileNotFoundError:
        raise ConfigurationError(f"Configuration file not found: {config_path}")
    except yaml.YAMLError as e:
        raise ConfigurationError(f"Invalid YAML in configuration file: {e}")

    if not isinstance(yaml_config, dict):
        raise ConfigurationError(f"Configuration root must be a mapping: {config_path}")

    load_dotenv()
    env_vars = {
        "SNLS_LOG_LEVEL": os.getenv("SNLS_LOG_LEVEL"),
        "SNLS_OUTPUT_DIR": os.getenv("SNLS_OUTPUT_DIR"),
        "SNLS_NUM_POINTS": os.getenv("SNLS_NUM_POINTS"),
    }

    try:
        grid = _section(GridConfig, yaml_config.get("grid"))
        if env_vars["SNLS_NUM_POINTS"]:
            grid.num_points = int(env_vars["SNLS_NUM_POINTS"])

        output = _section(OutputConfig, yaml_config.get("output"))
        if env_vars["SNLS_OUTPUT_DIR"]:
            output.output_dir = env_vars["SNLS_OUTPUT_DIR"]

        logging = _section(LoggingConfig, yaml_config.get("logging"))
        if env_vars["SNLS_LOG_LEVEL"]:
            logging.level = env_vars["SNLS_LOG_LEVEL"].upper()

        return Config(
            grid=grid,
            ground_state=_section(GroundStateConfig, yaml_config.get("ground_state")),
            spectrum=_section(SpectrumConfig, yaml_config.get("spectrum")),
            bifurcation=_section(BifurcationConfig, yaml_config.get("bifurcation")),
            continuation=_section(ContinuationConfig, yaml_config.get("continuation")),
            energy=_section(EnergyConfig, yaml_config.get("energy")),
            output=output,
            logging=logging,
        )

    except KeyError as e:
        raise ConfigurationError(f"Missing required configuration key: {e}")
    except (ValueError, TypeError) as e:
        raise ConfigurationError(f"Invalid configuration value: {e}")


def validate_config(config: Config) -> None:
    """
    Validate configuration values.

    Args:
        config: Configuration object to validate

    Raises:
        ConfigurationError: If configuration values are invalid
    """
    if config.grid.num_points < 3:
        raise ConfigurationError(
            f"Invalid num_points: {config.grid.num_points}. Must be at least 3."
        )
    if config.grid.decay_margin <= 0:
        raise ConfigurationError(
            f"Invalid decay_margin: {config.grid.decay_margin}. Must be positive."
        )

    if config.spectrum.k_max < 1:
        raise ConfigurationError(f"Invalid k_max: {config.spectrum.k_max}. Must be >= 1.")
    if not 0 < config.spectrum.end_margin < 1:
        raise ConfigurationError(
            f"Invalid end_margin: {config.spectrum.end_margin}. Must be in (0, 1)."
        )

    bif = config.bifurcation
    if not 0 < bif.s_min_fraction < bif.s_max_fraction < 1:
        raise ConfigurationError(
            "Bifurcation s-range fractions must satisfy 0 < s_min_fraction < s_max_fraction < 1"
        )
    if bif.s_count < 2:
        raise ConfigurationError(f"Invalid s_count: {bif.s_count}. Must be >= 2.")

    cont = config.continuation
    for name in ("step", "newton_tol", "amplitude_factor", "step_min", "step_max"):
        if getattr(cont, name) <= 0:
            raise ConfigurationError(f"Invalid continuation.{name}: must be positive.")
    if cont.initial_amplitude is not None and cont.initial_amplitude <= 0:
        raise ConfigurationError("Invalid continuation.initial_amplitude: must be positive.")
    if cont.step_min > cont.step_max:
        raise ConfigurationError(
            f"step_min ({cont.step_min}) must be <= step_max ({cont.step_max})"
        )
    if cont.max_steps < 1 or cont.newton_max_iter < 1:
        raise ConfigurationError("max_steps and newton_max_iter must be >= 1")

    if config.ground_state.cache_size < 1 or config.energy.cache_size < 1:
        raise ConfigurationError("ground_state.cache_size and energy.cache_size must be >= 1")

    if config.output.format not in ("csv", "json"):
        raise ConfigurationError(
            f"Invalid output format: {config.output.format}. Must be csv or json."
        )

    valid_log_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    if config.logging.level not in valid_log_levels:
        raise ConfigurationError(
            f"Invalid log level: {config.logging.level}. "
            f"Must be one of {', '.join(valid_log_levels)}"
        )

    if config.logging.file_output:
        try:
            Path(config.logging.log_dir).mkdir(parents=True, exist_ok=True)
        except Exception as e:
            raise ConfigurationError(f"Cannot create directory {config.logging.log_dir}: {e}")


def get_config(config_path: Optional[str] = DEFAULT_CONFIG_PATH) -> Config:
    """
    Load and validate configuration.

    Args:
        config_path: Path to configuration YAML file; None uses built-in defaults

    Returns:
        Validated Config object

    Raises:
        ConfigurationError: If configuration is invalid
    """
    config = default_config() if config_path is None else load_config(config_path)
    validate_config(config)
    return config
