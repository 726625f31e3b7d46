"""
Saturated NLS toolkit - command-line entry point.

Usage:
    python -m src.main <command> --lambda1 1 --lambda2 0.25 --alpha 1 --beta 1 [options]

Results go to --out (or stdout); logs go to stderr.
"""

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
import yaml

from src.app_factory import create_app, resolve_config
from src.bifurcation import (
    check_corollary1,
    check_corollary2,
    corollary2_bound,
    default_s_grid,
    positivity_constraint,
)
from src.exceptions import ConfigurationError, DomainError, SaturatedNLSError
from src.models import (
    Branch,
    Command,
    OutputFormat,
    Params,
    RadialGrid,
    RunConfig,
    SweepSpec,
)
from src.spectrum import (
    box_potential_eigen,
    mu_bar_closed_form,
    mu_bar_upper_bound,
    mu_limit_saturation,
    square_well_eigenvalue_1d,
)
from src.storage import bifurcation_frame, eigencurves_frame, profile_frame

EXIT_OK = 0
EXIT_USAGE = 64

# flag name -> converter, shared by argparse and the --config file
OPTIONS: Dict[str, Callable[[Any], Any]] = {
    "lambda1": float,
    "lambda2": float,
    "alpha": float,
    "beta": float,
    "s": float,
    "n": int,
    "rmax": float,
    "points": int,
    "kmax": int,
    "smin": float,
    "smax": float,
    "scount": int,
    "tol": float,
    "out": str,
    "format": str,
    "k": int,
    "direction": int,
    "steps": int,
    "kappa": float,
    "eps": float,
    "settings": str,
}
REQUIRED = ("lambda1", "lambda2", "alpha", "beta")


class _ArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that exits with EX_USAGE (64) on bad arguments."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="saturated-nls",
        description="Ground states, spectra and bifurcating branches of a saturated NLS system.",
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    for name, kind in OPTIONS.items():
        if name == "format":
            parser.add_argument("--format", choices=[f.value for f in OutputFormat])
        elif name == "direction":
            parser.add_argument("--direction", type=int, choices=(1, -1))
        else:
            parser.add_argument(f"--{name}", type=kind)
    parser.add_argument("--config", help="key=value, .json or .yaml file with flag values")
    return parser


def read_config_file(path: str) -> Dict[str, Any]:
    """
    Read flag values from a key=value, JSON or YAML file.

    Raises:
        ConfigurationError: If the file is missing, malformed or names unknown keys
    """
    target = Path(path)
    try:
        text = target.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config file {path}: {e}") from e

    try:
        if target.suffix == ".json":
            values = json.loads(text)
        elif target.suffix in (".yaml", ".yml"):
            values = yaml.safe_load(text) or {}
        else:
            values = {}
            for number, line in enumerate(text.splitlines(), start=1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(f"{path}:{number}: expected key=value")
                key, value = line.split("=", 1)
                values[key.strip()] = value.strip()
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Invalid config file {path}: {e}") from e

    if not isinstance(values, dict):
        raise ConfigurationError(f"Config file {path} must hold a mapping")

    parsed = {}
    for key, value in values.items():
        name = str(key).lstrip("-").replace("-", "_")
        if name not in OPTIONS:
            raise ConfigurationError(f"Unknown key in config file {path}: {key}")
        try:
            parsed[name] = OPTIONS[name](value)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Invalid value for {key} in {path}: {value}") from e
    return parsed


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the config file and flags (flags win) into a RunConfig.

    Raises:
        ConfigurationError: For missing parameters or malformed files
        DomainError: For invalid physical parameters
    """
    values: Dict[str, Any] = read_config_file(args.config) if args.config else {}
    values.update({k: v for k, v in vars(args).items() if v is not None and k in OPTIONS})

    missing = [name for name in REQUIRED if name not in values]
    if missing:
        raise ConfigurationError(
            "missing required parameters: " + ", ".join(f"--{m}" for m in missing)
        )
    if values.get("format") not in (None, "csv", "json"):
        raise ConfigurationError(f"Invalid format: {values['format']}")
    if values.get("direction") not in (None, 1, -1):
        raise ConfigurationError(f"Invalid direction: {values['direction']}")

    params = Params(
        lambda1=values["lambda1"],
        lambda2=values["lambda2"],
        alpha=values["alpha"],
        beta=values["beta"],
        s=values.get("s", 0.0),
        n=values.get("n", 1),
    )

    sweep = None
    if any(name in values for name in ("smin", "smax", "scount")):
        sweep = SweepSpec(
            s_min=values.get("smin", 0.01 * params.s_star_u),
            s_max=values.get("smax", 0.99 * params.s_star_u),
            count=values.get("scount", 200),
        )

    return RunConfig(
        command=Command(args.command),
        params=params,
        r_max=values.get("rmax"),
        num_points=values.get("points"),
        k_max=values.get("kmax"),
        sweep=sweep,
        tol=values.get("tol"),
        output_path=values.get("out"),
        format=OutputFormat(values["format"]) if "format" in values else None,
        k=values.get("k", 0),
        direction=values.get("direction", 1),
        steps=values.get("steps"),
        kappa=values.get("kappa", 1.0),
        eps=values.get("eps", 0.05),
        settings_path=values.get("settings"),
    )


class Runner:
    """Dispatches one RunConfig to the solver components."""

    COMPONENT = "CLI"

    def __init__(self, run: RunConfig, components: Dict[str, Any]):
        self.run = run
        self.config = components["config"]
        self.logger = components["logger"]
        self.storage = components["file_storage"]
        self.ground_state = components["ground_state"]
        self.spectrum = components["spectrum"]
        self.bifurcation = components["bifurcation"]
        self.continuer = components["continuer"]
        self.energy = components["energy"]

    @property
    def params(self) -> Params:
        return self.run.params

    @property
    def k_max(self) -> int:
        return self.run.k_max or self.config.spectrum.k_max

    @property
    def output_format(self) -> OutputFormat:
        """--format, falling back to output.format from the settings."""
        return self.run.format or OutputFormat(self.config.output.format)

    @property
    def output_path(self) -> Optional[str]:
        """--out with relative paths placed under output.output_dir; None is stdout."""
        if self.run.output_path is None:
            return None
        target = Path(self.run.output_path)
        if not target.is_absolute():
            target = Path(self.config.output.output_dir) / target
        return str(target)

    def grid(self, min_radius: float = 0.0) -> RadialGrid:
        """Grid from --rmax/--points; r_max defaults to the decay margin."""
        margin = self.config.grid.decay_margin
        needed = max(RadialGrid.min_r_max(self.params, margin), min_radius)
        r_max = self.run.r_max or needed
        if r_max < needed:
            self.logger.warning(
                component=self.COMPONENT,
                operation="grid",
                message=f"r_max={r_max} is below the decay margin {needed:.6g}",
                metadata={"r_max": r_max, "recommended": needed},
            )
        num_points = self.run.num_points or self.config.grid.num_points
        return RadialGrid(r_max=r_max, num_points=num_points)

    def s_grid(self) -> Optional[np.ndarray]:
        return self.run.sweep.values() if self.run.sweep else None

    def write_frame(self, frame: pd.DataFrame, kind: str) -> None:
        if self.output_format is OutputFormat.JSON:
            payload = {
                "command": self.run.command.value,
                "params": self.params.to_dict(),
                "columns": list(frame.columns),
                "rows": frame.to_dict(orient="records"),
            }
            self.storage.write_json(payload, self.output_path, kind=kind)
        else:
            self.storage.write_table(frame, self.output_path, kind=kind)

    def execute(self) -> None:
        handlers = {
            Command.GROUND_STATE: self.ground_state_command,
            Command.SPECTRUM: self.spectrum_command,
            Command.EIGENCURVES: self.eigencurves_command,
            Command.BIFURCATION_POINTS: self.bifurcation_command,
            Command.CONTINUE_BRANCH: self.continue_branch_command,
            Command.VERIFY_GROUNDSTATE: self.verify_command,
            Command.CHECK_CONDITIONS: self.check_conditions_command,
            Command.BOX_ORACLE: self.box_oracle_command,
        }
        with self.logger.log_timing(
            self.COMPONENT, self.run.command.value, {"params": self.params.to_dict()}
        ):
            handlers[self.run.command]()

    def ground_state_command(self) -> None:
        prob = self.params.scalar_u()
        prob.require_window("alpha/lambda1")
        profile = self.ground_state.solve(prob, self.grid())
        self.write_frame(profile_frame(profile, "u"), "ground state")

    def spectrum_command(self) -> None:
        self.params.scalar_u().require_window("alpha/lambda1")
        spectrum = self.spectrum.spectrum_at(self.params, self.grid(), self.k_max)
        frame = pd.DataFrame({"k": np.arange(spectrum.count), "mu": spectrum.eigenvalues})
        self.write_frame(frame, "spectrum")

    def eigencurves_command(self) -> None:
        s_values = self.s_grid()
        if s_values is None:
            s_values = default_s_grid(self.params, self.config.bifurcation)
        curves = self.spectrum.eigenvalue_curves(self.params, s_values, self.k_max, self.grid())
        self.write_frame(eigencurves_frame(curves), "eigencurves")

    def _search(self, k_range: List[int]):
        return self.bifurcation.search(
            self.params, self.grid(), k_range, s_grid=self.s_grid(), tol=self.run.tol
        )

    def bifurcation_command(self) -> None:
        search = self._search(list(range(self.k_max)))
        self.write_frame(bifurcation_frame(search.points), "bifurcation points")

    def continue_branch_command(self) -> None:
        search = self._search([self.run.k])
        if not search.points:
            raise DomainError(f"no crossing detected for k={self.run.k} on the s-grid")
        if self.run.steps:
            self.continuer.config = replace(self.continuer.config, max_steps=self.run.steps)
        branch = self.continuer.continue_branch(
            search.points[0], self.params, direction=self.run.direction
        )
        self.storage.export_branch(branch, self.output_path, self.output_format)

    def verify_command(self) -> None:
        grid = self.grid()
        params = self.params
        branches: List[Branch] = []
        # without λ₂/λ₁ < β/α nothing bifurcates from (u_s, 0): levels only
        if not params.is_symmetric and params.lambda_ratio < params.coupling_ratio:
            search = self._search(list(range(self.k_max)))
            for point in search.points:
                if any(b.k == point.k for b in branches):
                    continue
                for direction in (1, -1):
                    branches.append(self.continuer.continue_branch(point, params, direction))
        else:
            self.logger.info(
                component=self.COMPONENT,
                operation="verify",
                message="No bifurcation from the semitrivial branch; checking levels only",
                metadata={"symmetric": params.is_symmetric},
            )
        report = self.energy.verify(branches, params, grid)
        self.storage.write_report(
            {
                "command": self.run.command.value,
                "params": self.params.to_dict(),
                "c_s_star": report.c_s_star,
                "level_u": report.level_u,
                "level_v": report.level_v,
                "tolerance": report.tolerance,
                "symmetric_case": report.symmetric_case,
                "theta_energy_spread": report.theta_energy_spread,
                "candidates": len(report.candidates),
                "violations": [vars(v) for v in report.violations],
                "branches": [
                    {
                        "k": b.k,
                        "direction": b.direction,
                        "points": len(b),
                        "termination": b.termination.value if b.termination else None,
                    }
                    for b in branches
                ],
            },
            self.output_path,
        )

    def check_conditions_command(self) -> None:
        params = self.params
        verdict = positivity_constraint(params)
        report: Dict[str, Any] = {
            "command": self.run.command.value,
            "params": params.to_dict(),
            "lambda_ratio": params.lambda_ratio,
            "coupling_ratio": params.coupling_ratio,
            "hypothesis": params.lambda_ratio < params.coupling_ratio,
            "existence_window": {"u": params.s_star_u, "v": params.s_star_v},
            "mu_limit_saturation": mu_limit_saturation(params),
            "positivity": {"kind": verdict.kind.value, "bound": verdict.bound},
            "corollary1": None,
            "corollary2": None,
        }
        if params.n == 1:
            report["corollary2"] = [
                {
                    "k0": k0,
                    "holds": check_corollary2(params, k0),
                    "bound": corollary2_bound(params, k0),
                    "mu_bar": mu_bar_closed_form(params, k0),
                }
                for k0 in range(self.k_max)
            ]
        else:
            report["corollary1"] = {
                "holds": check_corollary1(params),
                "bound": params.lambda_ratio ** ((4 - params.n) / 4.0),
                "mu_bar_upper_bound": mu_bar_upper_bound(params),
            }
        self.storage.write_report(report, self.output_path)

    def box_oracle_command(self) -> None:
        lam = self.params.lambda2
        eps = self.run.eps
        grid = self.grid(min_radius=1.0 / eps + self.config.grid.decay_margin / math.sqrt(lam))
        rows = []
        for k in range(self.k_max):
            mu = box_potential_eigen(self.run.kappa, lam, eps, k, self.params.n, grid)
            well = (
                square_well_eigenvalue_1d(self.run.kappa, lam, eps, k)
                if self.params.n == 1
                else float("nan")
            )
            rows.append({"k": k, "eps": eps, "mu": mu, "square_well": well})
        self.write_frame(pd.DataFrame(rows, columns=["k", "eps", "mu", "square_well"]), "box")


def run(config: RunConfig) -> int:
    """
    Execute one command.

    Returns:
        0 on success, 1 on domain errors, 2 on solver failures, 64 on
        configuration errors and 74 on export failures
    """
    try:
        settings = resolve_config(config.settings_path)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code

    components = create_app(config=settings)
    logger = components["logger"]
    try:
        Runner(config, components).execute()
    except SaturatedNLSError as e:
        logger.log_error("CLI", config.command.value, e, {"exit_code": e.exit_code})
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and run; returns the process exit status."""
    args = build_parser().parse_args(argv)
    try:
        run_config = build_run_config(args)
    except SaturatedNLSError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    return run(run_config)


if __name__ == "__main__":
    sys.exit(main())
