#!/usr/bin/env python3
"""
Acceptance Validation Script

Quick numerical checks of the saturated NLS toolkit against known values:
closed-form ground states, the s = 0 eigenvalues, the saturation limit and
the semitrivial energy levels. Run from the repository root.
"""

import sys
import time
from pathlib import Path
from typing import Callable, List, Tuple

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))


class Colors:
    """ANSI color codes for terminal output"""
    GREEN = '\033[92m'
    RED = '\033[91m'
    YELLOW = '\033[93m'
    BLUE = '\033[94m'
    BOLD = '\033[1m'
    END = '\033[0m'


def print_header(text: str):
    """Print a section header"""
    print(f"\n{Colors.BOLD}{Colors.BLUE}{'=' * 70}{Colors.END}")
    print(f"{Colors.BOLD}{Colors.BLUE}{text}{Colors.END}")
    print(f"{Colors.BOLD}{Colors.BLUE}{'=' * 70}{Colors.END}\n")


def print_success(text: str):
    print(f"{Colors.GREEN}✓ {text}{Colors.END}")


def print_error(text: str):
    print(f"{Colors.RED}✗ {text}{Colors.END}")


def print_warning(text: str):
    print(f"{Colors.YELLOW}⚠ {text}{Colors.END}")


def print_info(text: str):
    print(f"  {text}")


def check_packages() -> bool:
    """Check that the numerical stack imports"""
    print_header("Checking Packages")
    all_good = True
    for module in ("numpy", "scipy", "pandas", "yaml", "dotenv"):
        try:
            __import__(module)
            print_success(f"{module} is installed")
        except ImportError:
            print_error(f"{module} is missing (pip install -r requirements.txt)")
            all_good = False
    return all_good


def relative_error(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)


def check_sech_ground_state() -> Tuple[bool, str]:
    """At s = 0 in 1D, u_0(0) = √(2λ/α)."""
    from src.ground_state import peak_amplitude_1d
    from src.models import ScalarProblem

    peak = peak_amplitude_1d(ScalarProblem(lam=1.0, coupling=1.0, s=0.0))
    error = relative_error(peak, 2.0 ** 0.5)
    return error < 1e-8, f"u_0(0) = {peak:.12f}, relative error {error:.1e}"


def _quiet_app():
    from src.app_factory import create_app
    from src.config import default_config

    config = default_config()
    config.logging.console_output = False
    config.logging.file_output = False
    return create_app(config=config, run_id="acceptance")


def check_mu_at_zero() -> Tuple[bool, str]:
    """μ_0(0) = 8/3 and μ_1(0) = 8/35 for λ₂/λ₁ = 1/4, α = β (ω = 1/2)."""
    from src.models import Params, RadialGrid

    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, s=0.0, n=1)
    grid = RadialGrid(r_max=40.0, num_points=4001)
    mu = _quiet_app()["spectrum"].spectrum_at(params, grid, 2).eigenvalues
    errors = [relative_error(mu[0], 8.0 / 3.0), relative_error(mu[1], 8.0 / 35.0)]
    return max(errors) < 1e-2, f"μ_0 = {mu[0]:.6f}, μ_1 = {mu[1]:.6f}"


def check_saturation_limit() -> Tuple[bool, str]:
    """μ_0(s) rises toward βλ₁/(αλ₂) = 4 and is within 5% of it at s = 0.99."""
    from src.models import Params, RadialGrid
    from src.spectrum import mu_limit_saturation

    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, n=1)
    grid = RadialGrid(r_max=60.0, num_points=6001)
    spectrum = _quiet_app()["spectrum"]
    limit = mu_limit_saturation(params)
    mu0 = [
        float(spectrum.spectrum_at(params.with_s(s), grid, 1).eigenvalues[0])
        for s in (0.95, 0.97, 0.99)
    ]
    gap = relative_error(mu0[-1], limit)
    ok = mu0[0] < mu0[1] < mu0[2] < limit and gap <= 0.05
    values = ", ".join(f"{value:.4f}" for value in mu0)
    return ok, f"μ_0(0.95, 0.97, 0.99) = {values}; limit {limit}, gap {gap:.2%}"


def check_semitrivial_levels() -> Tuple[bool, str]:
    """At s = 0, I_0(u_0, 0) = 4/3 and I_0(0, v_0) = 1/6."""
    from src.energy import semitrivial_levels
    from src.models import Params, RadialGrid

    params = Params(lambda1=1.0, lambda2=0.25, alpha=1.0, beta=1.0, s=0.0, n=1)
    levels = semitrivial_levels(params, RadialGrid(r_max=60.0, num_points=6001))
    ok = (
        relative_error(levels.level_u, 4.0 / 3.0) < 1e-3
        and relative_error(levels.level_v, 1.0 / 6.0) < 1e-3
    )
    return ok, f"I(u_0, 0) = {levels.level_u:.6f}, I(0, v_0) = {levels.level_v:.6f}"


def main():
    """Run all acceptance checks"""
    print(f"\n{Colors.BOLD}Saturated NLS Toolkit - Acceptance Validation{Colors.END}")

    if not check_packages():
        print_error("\nRequired packages missing. Please fix the issues above.")
        sys.exit(1)

    checks: List[Tuple[str, Callable[[], Tuple[bool, str]]]] = [
        ("Closed-form ground state at s = 0", check_sech_ground_state),
        ("Eigenvalues μ_k(0)", check_mu_at_zero),
        ("Saturation limit of μ_0", check_saturation_limit),
        ("Semitrivial energy levels", check_semitrivial_levels),
    ]

    print_header("Running Acceptance Checks")
    failed = 0
    for description, check in checks:
        start = time.time()
        try:
            ok, detail = check()
        except Exception as e:
            ok, detail = False, f"{type(e).__name__}: {e}"
        duration = time.time() - start
        if ok:
            print_success(f"{description} ({duration:.1f}s)")
        else:
            print_error(f"{description} ({duration:.1f}s)")
            failed += 1
        print_info(detail)

    print_header("Validation Summary")
    if failed == 0:
        print_success(f"All {len(checks)} acceptance checks passed")
        sys.exit(0)
    print_error(f"{failed} of {len(checks)} acceptance checks failed")
    print_warning("Run pytest -m 'not slow' for details")
    sys.exit(1)


if __name__ == "__main__":
    main()
