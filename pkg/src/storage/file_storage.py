"""
Result export for the saturated NLS toolkit.

This module provides the FileStorage class that writes eigenvalue curves,
bifurcation tables, branches and verification reports as CSV or JSON,
either to a file or to stdout, and reads exported branches back.
"""

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from src.exceptions import ExportError
from src.models import (
    BifurcationPoint,
    Branch,
    BranchPoint,
    EigenCurves,
    OutputFormat,
    Params,
    RadialGrid,
    RadialProfile,
    StatePair,
    TerminationReason,
)

BRANCH_COLUMNS = [
    "step",
    "s",
    "energy",
    "residual",
    "nodes_u",
    "nodes_v",
    "min_u",
    "min_v",
    "norm_u",
    "norm_v",
]


def branch_frame(branch: Branch) -> pd.DataFrame:
    """One row per branch point, columns BRANCH_COLUMNS."""
    rows = [
        {
            "step": p.step,
            "s": p.s,
            "energy": p.energy,
            "residual": p.residual_norm,
            "nodes_u": p.nodal_type[0],
            "nodes_v": p.nodal_type[1],
            "min_u": p.min_values[0],
            "min_v": p.min_values[1],
            "norm_u": p.norms[0],
            "norm_v": p.norms[1],
        }
        for p in branch.points
    ]
    return pd.DataFrame(rows, columns=BRANCH_COLUMNS)


def eigencurves_frame(curves: EigenCurves) -> pd.DataFrame:
    """Columns s, mu_0, ..., mu_{k_max-1}."""
    frame = pd.DataFrame(curves.mu, columns=[f"mu_{k}" for k in range(curves.k_max)])
    frame.insert(0, "s", curves.s_values)
    return frame


def bifurcation_frame(points: List[BifurcationPoint]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "k": p.k,
                "s_k": p.s_k,
                "s_lo": p.bracket[0],
                "s_hi": p.bracket[1],
                "mu_residual": p.mu_residual,
            }
            for p in points
        ],
        columns=["k", "s_k", "s_lo", "s_hi", "mu_residual"],
    )


def profile_frame(profile: RadialProfile, name: str = "u") -> pd.DataFrame:
    return pd.DataFrame({"r": profile.grid.nodes, name: profile.values})


def branch_to_dict(branch: Branch) -> Dict[str, Any]:
    """JSON-ready mirror of a Branch, profiles included."""
    grid = branch.origin.kernel_fn.grid
    return {
        "k": branch.k,
        "direction": branch.direction,
        "termination": branch.termination.value if branch.termination else None,
        "message": branch.message,
        "params": branch.params.to_dict(),
        "grid": {"r_max": grid.r_max, "num_points": grid.num_points},
        "origin": {
            "k": branch.origin.k,
            "s_k": branch.origin.s_k,
            "bracket": list(branch.origin.bracket),
            "mu_residual": branch.origin.mu_residual,
            "kernel_fn": branch.origin.kernel_fn.values.tolist(),
        },
        "points": [
            {
                "step": p.step,
                "s": p.s,
                "residual": p.residual_norm,
                "energy": p.energy,
                "nodes_u": p.nodal_type[0],
                "nodes_v": p.nodal_type[1],
                "min_u": p.min_values[0],
                "min_v": p.min_values[1],
                "norm_u": p.norms[0],
                "norm_v": p.norms[1],
                "u": p.state.u.values.tolist(),
                "v": p.state.v.values.tolist(),
            }
            for p in branch.points
        ],
    }


def branch_from_dict(data: Dict[str, Any]) -> Branch:
    """Inverse of branch_to_dict."""
    grid = RadialGrid(r_max=data["grid"]["r_max"], num_points=data["grid"]["num_points"])
    origin_data = data["origin"]
    origin = BifurcationPoint(
        k=origin_data["k"],
        s_k=origin_data["s_k"],
        kernel_fn=RadialProfile(grid, np.array(origin_data["kernel_fn"])),
        bracket=tuple(origin_data["bracket"]),
        mu_residual=origin_data["mu_residual"],
    )
    points = [
        BranchPoint(
            step=p["step"],
            state=StatePair(
                RadialProfile(grid, np.array(p["u"])), RadialProfile(grid, np.array(p["v"]))
            ),
            s=p["s"],
            residual_norm=p["residual"],
            energy=p["energy"],
            nodal_type=(p["nodes_u"], p["nodes_v"]),
            min_values=(p["min_u"], p["min_v"]),
            norms=(p["norm_u"], p["norm_v"]),
        )
        for p in data["points"]
    ]
    termination = data.get("termination")
    return Branch(
        k=data["k"],
        origin=origin,
        params=Params(**data["params"]),
        direction=data["direction"],
        points=points,
        termination=TerminationReason(termination) if termination else None,
        message=data.get("message", ""),
    )


def _json_default(value: Any) -> Any:
    if isinstance(value, (np.integer, np.floating, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class FileStorage:
    """
    Writer for CSV/JSON results.

    A path of None writes to stdout. Floats are written with 17 significant
    digits so exports are reproducible bit for bit.
    """

    COMPONENT = "FileStorage"

    def __init__(self, significant_digits: int = 17, logger=None):
        """
        Initialize result storage.

        Args:
            significant_digits: Digits used for floats in CSV output
            logger: Optional LoggingManager instance
        """
        self.float_format = f"%.{significant_digits}g"
        self.logger = logger

    def _ensure_directory_exists(self, directory: Path) -> None:
        """
        Ensure directory exists, create if it doesn't.

        Raises:
            ExportError: If the directory cannot be created
        """
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            error_msg = f"Failed to create directory {directory}: {e}"
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="ensure_directory_exists",
                    message=error_msg,
                    exc_info=e,
                )
            raise ExportError(error_msg) from e

    def _write_text(self, text: str, path: Optional[str], kind: str) -> None:
        if path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        target = Path(path)
        self._ensure_directory_exists(target.parent)
        try:
            with open(target, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            error_msg = f"Failed to write {kind} to {target}: {e}"
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="write",
                    message=error_msg,
                    exc_info=e,
                )
            raise ExportError(error_msg) from e

        if self.logger:
            self.logger.info(
                component=self.COMPONENT,
                operation="write",
                message=f"Wrote {kind} to {target}",
                metadata={"path": str(target), "bytes": len(text.encode("utf-8"))},
            )

    def write_table(self, frame: pd.DataFrame, path: Optional[str], kind: str = "table") -> None:
        """Write a DataFrame as CSV."""
        text = frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")
        self._write_text(text, path, kind)

    def write_json(
        self, payload: Dict[str, Any], path: Optional[str], kind: str = "report"
    ) -> None:
        text = json.dumps(payload, indent=2, default=_json_default) + "\n"
        self._write_text(text, path, kind)

    def write_report(self, report: Dict[str, Any], path: Optional[str]) -> None:
        """Reports are always JSON."""
        self.write_json(report, path, kind="report")

    def export_branch(
        self, branch: Branch, path: Optional[str], fmt: OutputFormat = OutputFormat.CSV
    ) -> None:
        """
        Export a branch.

        CSV has exactly the BRANCH_COLUMNS header and one row per point in
        step order; JSON mirrors the Branch including the origin and profiles.

        Raises:
            ExportError: If the file cannot be written
        """
        if fmt is OutputFormat.JSON:
            self.write_json(branch_to_dict(branch), path, kind="branch")
        else:
            self.write_table(branch_frame(branch), path, kind="branch")

    def import_branch(self, path: str) -> Branch:
        """
        Read a branch exported as JSON.

        Raises:
            ExportError: If the file is missing or malformed
        """
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
            return branch_from_dict(data)
        except (OSError, ValueError, KeyError, TypeError) as e:
            error_msg = f"Failed to import branch from {path}: {e}"
            if self.logger:
                self.logger.error(
                    component=self.COMPONENT,
                    operation="import_branch",
                    message=error_msg,
                    exc_info=e,
                )
            raise ExportError(error_msg) from e


def export_branch(
    branch: Branch, path: Optional[str], fmt: OutputFormat = OutputFormat.CSV
) -> None:
    FileStorage().export_branch(branch, path, fmt)


def import_branch(path: str) -> Branch:
    return FileStorage().import_branch(path)
