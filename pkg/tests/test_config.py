"""
Tests for configuration loading and validation.
"""

from pathlib import Path

import pytest

from src.app_factory import create_app, resolve_config
from src.config import (
    Config,
    ContinuationConfig,
    default_config,
    get_config,
    load_config,
    validate_config,
)
from src.exceptions import ConfigurationError

REPO_CONFIG = Path(__file__).resolve().parents[1] / "config" / "config.yaml"


@pytest.fixture(autouse=True)
def clear_env(monkeypatch):
    for name in ("SNLS_LOG_LEVEL", "SNLS_OUTPUT_DIR", "SNLS_NUM_POINTS"):
        monkeypatch.delenv(name, raising=False)


@pytest.mark.unit
def test_repository_config_matches_defaults():
    """config/config.yaml spells out the built-in defaults."""
    assert load_config(str(REPO_CONFIG)) == default_config()


@pytest.mark.unit
def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("SNLS_LOG_LEVEL", "debug")
    monkeypatch.setenv("SNLS_NUM_POINTS", "2001")
    monkeypatch.setenv("SNLS_OUTPUT_DIR", "/tmp/snls")
    config = load_config(str(REPO_CONFIG))
    assert config.logging.level == "DEBUG"
    assert config.grid.num_points == 2001
    assert config.output.output_dir == "/tmp/snls"


@pytest.mark.unit
def test_unknown_key_is_rejected(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("continuation:\n  stepsize: 0.1\n")
    with pytest.raises(ConfigurationError) as exc_info:
        load_config(str(path))
    assert "stepsize" in str(exc_info.value)


@pytest.mark.unit
def test_partial_file_keeps_remaining_defaults(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("spectrum:\n  k_max: 3\n")
    config = load_config(str(path))
    assert config.spectrum.k_max == 3
    assert config.continuation == ContinuationConfig()


@pytest.mark.unit
def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(str(tmp_path / "absent.yaml"))

    broken = tmp_path / "broken.yaml"
    broken.write_text("grid: [unclosed\n")
    with pytest.raises(ConfigurationError):
        load_config(str(broken))

    scalar = tmp_path / "scalar.yaml"
    scalar.write_text("just a string\n")
    with pytest.raises(ConfigurationError):
        load_config(str(scalar))


@pytest.mark.unit
@pytest.mark.parametrize(
    "mutate",
    [
        lambda c: setattr(c.grid, "num_points", 2),
        lambda c: setattr(c.grid, "decay_margin", 0.0),
        lambda c: setattr(c.spectrum, "k_max", 0),
        lambda c: setattr(c.spectrum, "end_margin", 1.0),
        lambda c: setattr(c.bifurcation, "s_max_fraction", 1.0),
        lambda c: setattr(c.bifurcation, "s_count", 1),
        lambda c: setattr(c.continuation, "newton_tol", 0.0),
        lambda c: setattr(c.continuation, "initial_amplitude", -1e-3),
        lambda c: setattr(c.continuation, "step_min", 1.0),
        lambda c: setattr(c.continuation, "max_steps", 0),
        lambda c: setattr(c.ground_state, "cache_size", 0),
        lambda c: setattr(c.energy, "cache_size", 0),
        lambda c: setattr(c.output, "format", "xml"),
        lambda c: setattr(c.logging, "level", "VERBOSE"),
    ],
)
def test_validate_config_rejects_invalid_values(mutate):
    config = Config()
    mutate(config)
    with pytest.raises(ConfigurationError):
        validate_config(config)


@pytest.mark.unit
def test_get_config_without_path_uses_defaults():
    assert get_config(None) == default_config()


@pytest.mark.unit
def test_resolve_config_requires_explicit_file_to_exist(tmp_path):
    with pytest.raises(ConfigurationError):
        resolve_config(str(tmp_path / "absent.yaml"))


@pytest.mark.unit
def test_create_app_wires_shared_components():
    """Every solver shares the one ground-state solver and logger."""
    config = default_config()
    config.logging.console_output = False
    app = create_app(config=config, run_id="abc")

    assert app["config"] is config
    assert app["logger"].run_id == "abc"
    assert app["spectrum"].ground_state is app["ground_state"]
    assert app["continuer"].ground_state is app["ground_state"]
    assert app["energy"].ground_state is app["ground_state"]
    assert app["bifurcation"].spectrum is app["spectrum"]
    assert app["continuer"].tail_threshold == config.bifurcation.tail_threshold
