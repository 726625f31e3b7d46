"""
Storage module for result export.

This module writes eigenvalue curves, bifurcation tables, branches and
reports as CSV or JSON and reads exported branches back.
"""

from src.storage.file_storage import (
    BRANCH_COLUMNS,
    FileStorage,
    bifurcation_frame,
    branch_frame,
    eigencurves_frame,
    export_branch,
    import_branch,
    profile_frame,
)

__all__ = [
    "BRANCH_COLUMNS",
    "FileStorage",
    "bifurcation_frame",
    "branch_frame",
    "eigencurves_frame",
    "export_branch",
    "import_branch",
    "profile_frame",
]
