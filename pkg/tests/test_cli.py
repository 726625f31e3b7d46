"""
Tests for the command-line interface.

Commands run in-process through main(); results go to tmp_path files or
stdout, logs to stderr.
"""

import json

import pandas as pd
import pytest

from src.exceptions import ConfigurationError
from src.ground_state import peak_amplitude_1d
from src.main import EXIT_OK, EXIT_USAGE, build_parser, build_run_config, main, read_config_file
from src.models import Command, OutputFormat, Params, ScalarProblem
from src.spectrum import mu_bar

EXAMPLE = ["--lambda1", "1", "--lambda2", "0.25", "--alpha", "1", "--beta", "1"]


def cli(*args):
    return main(list(args))


@pytest.mark.unit
def test_check_conditions_report(tmp_path):
    """λ₂/λ₁ = 0.25, β/α = 1: the k₀ = 0 condition fails, k₀ = 1 holds."""
    out = tmp_path / "conditions.json"
    assert cli("check-conditions", *EXAMPLE, "--kmax", "2", "--out", str(out)) == EXIT_OK

    report = json.loads(out.read_text())
    assert report["hypothesis"] is True
    assert report["mu_limit_saturation"] == pytest.approx(4.0)
    assert report["existence_window"] == {"u": 1.0, "v": 4.0}
    assert [entry["holds"] for entry in report["corollary2"]] == [False, True]
    assert report["corollary2"][0]["mu_bar"] == pytest.approx(8.0 / 3.0)
    assert report["corollary1"] is None


@pytest.mark.unit
def test_check_conditions_in_three_dimensions(tmp_path):
    out = tmp_path / "conditions.json"
    args = ["--lambda1", "1", "--lambda2", "0.5", "--alpha", "1", "--beta", "0.7", "--n", "3"]
    assert cli("check-conditions", *args, "--out", str(out)) == EXIT_OK

    report = json.loads(out.read_text())
    assert report["corollary1"]["holds"] is True
    assert report["corollary2"] is None
    assert report["positivity"]["kind"] == "bound"
    assert report["positivity"]["bound"] == pytest.approx(0.6)


@pytest.mark.unit
def test_ground_state_outside_window_exits_with_domain_error(capsys):
    """s >= α/λ₁ is reported as a domain error naming the window."""
    assert cli("ground-state", *EXAMPLE, "--s", "1.0") == 1
    captured = capsys.readouterr()
    assert "alpha/lambda1" in captured.err
    assert captured.out == ""


@pytest.mark.unit
def test_ground_state_csv(tmp_path):
    out = tmp_path / "u.csv"
    args = ("ground-state", *EXAMPLE, "--s", "0.3", "--rmax", "20", "--points", "801")
    assert cli(*args, "--out", str(out)) == EXIT_OK

    frame = pd.read_csv(out)
    assert list(frame.columns) == ["r", "u"]
    assert len(frame) == 801
    assert abs(frame["u"].iloc[-1]) < 1e-6
    peak = peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=0.3))
    assert frame["u"].iloc[0] == pytest.approx(peak, rel=1e-3)


@pytest.mark.unit
def test_repeated_runs_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ("ground-state", *EXAMPLE, "--s", "0.5", "--rmax", "25", "--points", "601")
    assert cli(*args, "--out", str(first)) == EXIT_OK
    assert cli(*args, "--out", str(second)) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


@pytest.mark.unit
def test_spectrum_json_to_stdout(capsys):
    args = ("spectrum", *EXAMPLE, "--rmax", "30", "--points", "1001", "--kmax", "2")
    assert cli(*args, "--format", "json") == EXIT_OK

    payload = json.loads(capsys.readouterr().out)
    assert payload["command"] == "spectrum"
    assert payload["columns"] == ["k", "mu"]
    assert [row["k"] for row in payload["rows"]] == [0, 1]
    assert payload["rows"][0]["mu"] == pytest.approx(8.0 / 3.0, rel=1e-2)


@pytest.mark.unit
def test_box_oracle(tmp_path):
    """The box spectrum sits next to the 1D square-well root."""
    out = tmp_path / "box.csv"
    args = ("box-oracle", *EXAMPLE, "--eps", "0.1", "--kmax", "2", "--points", "6401")
    assert cli(*args, "--out", str(out)) == EXIT_OK

    frame = pd.read_csv(out)
    assert list(frame.columns) == ["k", "eps", "mu", "square_well"]
    for mu, well in zip(frame["mu"], frame["square_well"]):
        assert mu == pytest.approx(well, rel=1e-3)


@pytest.mark.unit
def test_continue_branch_without_crossing_exits_with_domain_error(capsys):
    """μ₀ stays above 1 for β/α = 1, so C₀ has no origin."""
    args = ("continue-branch", *EXAMPLE, "--k", "0", "--rmax", "30", "--points", "801")
    assert cli(*args, "--smin", "0.1", "--smax", "0.9", "--scount", "5") == 1
    assert "no crossing" in capsys.readouterr().err


@pytest.mark.unit
def test_unknown_flag_exits_with_usage():
    with pytest.raises(SystemExit) as exc_info:
        cli("spectrum", *EXAMPLE, "--bogus", "1")
    assert exc_info.value.code == EXIT_USAGE


@pytest.mark.unit
def test_unknown_command_and_bad_direction_exit_with_usage():
    with pytest.raises(SystemExit) as exc_info:
        cli("integrate", *EXAMPLE)
    assert exc_info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as exc_info:
        cli("continue-branch", *EXAMPLE, "--direction", "0")
    assert exc_info.value.code == EXIT_USAGE


@pytest.mark.unit
def test_missing_parameters_exit_with_usage(capsys):
    assert cli("spectrum", "--lambda1", "1") == EXIT_USAGE
    assert "--lambda2" in capsys.readouterr().err


@pytest.mark.unit
def test_unknown_config_key_exits_with_usage(tmp_path):
    path = tmp_path / "run.conf"
    path.write_text("lambda1 = 1\nlambda3 = 2\n")
    assert cli("check-conditions", "--config", str(path)) == EXIT_USAGE


@pytest.mark.unit
def test_config_file_values_are_overridden_by_flags(tmp_path):
    """key=value file with comments; --s on the command line wins."""
    path = tmp_path / "run.conf"
    path.write_text(
        "# example system\nlambda1 = 1\nlambda2 = 0.25\nalpha = 1\nbeta = 1\n"
        "s = 0.9\npoints = 501  # coarse\nformat = json\n"
    )
    args = build_parser().parse_args(["ground-state", "--config", str(path), "--s", "0.3"])
    run_config = build_run_config(args)

    assert run_config.command is Command.GROUND_STATE
    assert run_config.params.s == 0.3
    assert run_config.params.lambda2 == 0.25
    assert run_config.num_points == 501
    assert run_config.format is OutputFormat.JSON
    assert run_config.sweep is None


@pytest.mark.unit
def test_yaml_and_json_config_files(tmp_path):
    yaml_path = tmp_path / "run.yaml"
    yaml_path.write_text("lambda1: 1\nlambda2: 0.5\nalpha: 1\nbeta: 0.7\nn: 3\nsmax: 0.8\n")
    values = read_config_file(str(yaml_path))
    assert values["n"] == 3
    assert values["smax"] == 0.8

    json_path = tmp_path / "run.json"
    json_path.write_text(json.dumps({"--kmax": 4, "scount": "12"}))
    assert read_config_file(str(json_path)) == {"kmax": 4, "scount": 12}

    with pytest.raises(ConfigurationError):
        read_config_file(str(tmp_path / "absent.conf"))


@pytest.mark.unit
def test_sweep_defaults_fill_missing_ends():
    args = build_parser().parse_args(["eigencurves", *EXAMPLE, "--scount", "10"])
    sweep = build_run_config(args).sweep
    assert sweep.s_min == pytest.approx(0.01)
    assert sweep.s_max == pytest.approx(0.99)
    assert sweep.count == 10


@pytest.mark.unit
def test_unwritable_output_exits_74(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("file")
    args = ("ground-state", *EXAMPLE, "--s", "0.2", "--rmax", "20", "--points", "401")
    assert cli(*args, "--out", str(blocker / "u.csv")) == 74


@pytest.mark.unit
def test_eigencurves_first_row_matches_mu_bar(tmp_path):
    """At s = 0.001 the sampled μ_0, μ_1 sit within 1% of μ̄_0 = 8/3 and μ̄_1 = 8/35."""
    out = tmp_path / "curves.csv"
    args = ("eigencurves", *EXAMPLE, "--rmax", "30", "--points", "1501", "--kmax", "2")
    sweep = ("--smin", "0.001", "--smax", "0.5", "--scount", "4")
    assert cli(*args, *sweep, "--out", str(out)) == EXIT_OK

    frame = pd.read_csv(out)
    assert list(frame.columns) == ["s", "mu_0", "mu_1"]
    assert len(frame) == 4
    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0)
    first = frame.iloc[0]
    assert first["s"] == pytest.approx(0.001)
    assert first["mu_0"] == pytest.approx(mu_bar(params, 0), rel=1e-2)
    assert first["mu_1"] == pytest.approx(mu_bar(params, 1), rel=1e-2)


@pytest.mark.slow
def test_bifurcation_points_command(tmp_path):
    """β/α = 0.35: μ₀ crosses 1 once, inside its bracket."""
    out = tmp_path / "points.csv"
    args = ["--lambda1", "1", "--lambda2", "0.25", "--alpha", "1", "--beta", "0.35"]
    grid = ("--rmax", "40", "--points", "1601", "--kmax", "1")
    sweep = ("--smin", "0.02", "--smax", "0.95", "--scount", "32")
    assert cli("bifurcation-points", *args, *grid, *sweep, "--out", str(out)) == EXIT_OK

    frame = pd.read_csv(out)
    assert list(frame.columns) == ["k", "s_k", "s_lo", "s_hi", "mu_residual"]
    assert frame["k"].tolist() == [0]
    row = frame.iloc[0]
    assert row["s_lo"] <= row["s_k"] <= row["s_hi"]
    assert abs(row["mu_residual"]) < 1e-4


@pytest.mark.unit
def test_verify_groundstate_symmetric_case(tmp_path):
    """α = β, λ₁ = λ₂: no branch search, the θ-family energies agree."""
    out = tmp_path / "verify.json"
    args = ["--lambda1", "1", "--lambda2", "1", "--alpha", "1", "--beta", "1", "--s", "0.3"]
    grid = ("--rmax", "30", "--points", "1501")
    assert cli("verify-groundstate", *args, *grid, "--out", str(out)) == EXIT_OK

    report = json.loads(out.read_text())
    assert report["symmetric_case"] is True
    assert report["branches"] == []
    assert report["candidates"] == 0
    assert report["violations"] == []
    assert report["theta_energy_spread"] <= 1e-8 * abs(report["c_s_star"])


@pytest.mark.unit
def test_verify_groundstate_without_bifurcation(tmp_path):
    """β/α = 0.2 < λ₂/λ₁: only the semitrivial levels are reported."""
    out = tmp_path / "verify.json"
    args = ["--lambda1", "1", "--lambda2", "0.25", "--alpha", "1", "--beta", "0.2", "--s", "0.3"]
    grid = ("--rmax", "40", "--points", "1601")
    assert cli("verify-groundstate", *args, *grid, "--out", str(out)) == EXIT_OK

    report = json.loads(out.read_text())
    assert report["symmetric_case"] is False
    assert report["theta_energy_spread"] is None
    assert report["branches"] == []
    assert report["candidates"] == 0
    assert report["c_s_star"] == pytest.approx(min(report["level_u"], report["level_v"]))


@pytest.mark.unit
def test_relative_out_is_placed_under_output_dir(tmp_path, monkeypatch):
    """output.output_dir anchors a relative --out; output.format replaces the csv default."""
    monkeypatch.delenv("SNLS_OUTPUT_DIR", raising=False)
    results = tmp_path / "results"
    settings = tmp_path / "settings.yaml"
    settings.write_text(f"output:\n  format: json\n  output_dir: {results}\n")
    args = ("spectrum", *EXAMPLE, "--rmax", "30", "--points", "1001", "--kmax", "1")
    assert cli(*args, "--settings", str(settings), "--out", "mu.json") == EXIT_OK

    payload = json.loads((results / "mu.json").read_text())
    assert payload["command"] == "spectrum"
    assert payload["columns"] == ["k", "mu"]


@pytest.mark.unit
def test_format_flag_overrides_settings(tmp_path, monkeypatch):
    monkeypatch.delenv("SNLS_OUTPUT_DIR", raising=False)
    settings = tmp_path / "settings.yaml"
    settings.write_text(f"output:\n  format: json\n  output_dir: {tmp_path}\n")
    args = ("spectrum", *EXAMPLE, "--rmax", "30", "--points", "1001", "--kmax", "1")
    assert cli(*args, "--settings", str(settings), "--format", "csv", "--out", "mu.csv") == EXIT_OK

    frame = pd.read_csv(tmp_path / "mu.csv")
    assert list(frame.columns) == ["k", "mu"]
