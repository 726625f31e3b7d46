"""
Application factory for dependency injection and component initialization.

This module provides the create_app function that wires up all dependencies
and creates instances of all components with proper dependency injection.
"""

import uuid
from pathlib import Path
from typing import Any, Dict, Optional

from src.bifurcation import BifurcationAnalyzer
from src.config import DEFAULT_CONFIG_PATH, Config, get_config
from src.continuation import BranchContinuer
from src.energy import EnergyAnalyzer
from src.ground_state import GroundStateSolver
from src.log_manager.logging_manager import LoggingManager
from src.spectrum import SpectrumSolver
from src.storage.file_storage import FileStorage


def resolve_config(config_path: Optional[str] = None) -> Config:
    """
    Load the toolkit settings.

    An explicit path must exist; without one the default config file is used
    when present and built-in defaults otherwise.
    """
    if config_path is None and not Path(DEFAULT_CONFIG_PATH).is_file():
        return get_config(None)
    return get_config(config_path or DEFAULT_CONFIG_PATH)


def create_app(
    config_path: Optional[str] = None,
    config: Optional[Config] = None,
    run_id: Optional[str] = None,
) -> Dict[str, Any]:
    """
    Factory function to wire up dependencies and create application components.

    Args:
        config_path: Path to configuration YAML file
        config: Already loaded configuration (takes precedence over config_path)
        run_id: Identifier attached to every log record; generated when omitted

    Returns:
        Dictionary with all initialized components
    """
    config = config or resolve_config(config_path)

    logger = LoggingManager(config.logging, run_id=run_id or uuid.uuid4().hex[:12])

    file_storage = FileStorage(
        significant_digits=config.output.significant_digits,
        logger=logger,
    )

    ground_state = GroundStateSolver(
        config=config.ground_state,
        grid_config=config.grid,
        logger=logger,
    )

    spectrum = SpectrumSolver(
        ground_state=ground_state,
        config=config.spectrum,
        logger=logger,
    )

    bifurcation = BifurcationAnalyzer(
        spectrum=spectrum,
        config=config.bifurcation,
        logger=logger,
    )

    continuer = BranchContinuer(
        ground_state=ground_state,
        config=config.continuation,
        tail_threshold=config.bifurcation.tail_threshold,
        logger=logger,
    )

    energy = EnergyAnalyzer(
        ground_state=ground_state,
        config=config.energy,
        logger=logger,
    )

    return {
        "config": config,
        "logger": logger,
        "file_storage": file_storage,
        "ground_state": ground_state,
        "spectrum": spectrum,
        "bifurcation": bifurcation,
        "continuer": continuer,
        "energy": energy,
    }
