#!/usr/bin/env python3
"""
Complete System Check - Verify the numerical pipeline on families with known answers
"""

import argparse
import sys
from typing import List, Optional

import numpy as np
from rich.console import Console
from rich.table import Table

from models.errors import ChainAnalysisError
from models.report_models import FamilySpec
from services import family_service
from services.chain_service import stationary
from services.hitting_time_service import moments, sep_continuous, lagrange_tail
from services.service_container import ServiceContainer
from services.spectral_service import closed_form_values, eigenvalues

console = Console()

CHECK_FAMILIES = [
    FamilySpec("srw", {"n": 40}),
    FamilySpec("biased_walk", {"p": 0.75, "n": 30}),
    FamilySpec("bernoulli_laplace", {"n": 60, "r": 20}),
    FamilySpec("hamming", {"n": 4, "r": 25}),
    FamilySpec("theta_hypercube", {"theta": 0.5, "r": 30}),
    FamilySpec("q_subspace", {"q": 2, "n": 20, "m": 10}),
    FamilySpec("metropolis", {"n": 30, "target": "uniform"}),
]


def check_family(spec: FamilySpec, tolerance: float) -> dict:
    """Numeric spectrum and stationary law against their closed forms"""
    chain = family_service.build(spec)
    spectrum = eigenvalues(chain)
    exact = closed_form_values(spec)
    spectrum_error = float(np.max(np.abs(spectrum.lambdas - exact) / np.maximum(exact, 1.0)))

    nu = stationary(chain).nu
    stationary_error = float(np.max(np.abs(nu - family_service.closed_form_stationary(spec))))

    mean = moments(spectrum).mean
    mean_error = abs(mean - float(np.sum(1.0 / exact))) / mean
    healthy = spectrum_error < tolerance and stationary_error < tolerance and mean_error < tolerance
    return {
        "family": spec.label(),
        "m": chain.m,
        "spectrum_error": spectrum_error,
        "stationary_error": stationary_error,
        "mean_error": mean_error,
        "ok": healthy,
    }


def check_lagrange(tolerance: float) -> bool:
    """Uniformization against the closed-form tail on a small chain"""
    spectrum = eigenvalues(family_service.build(FamilySpec("srw", {"n": 8})))
    mean = moments(spectrum).mean
    for t in (0.5 * mean, mean, 2.0 * mean):
        if abs(sep_continuous(spectrum, t) - lagrange_tail(spectrum, t)) > tolerance:
            return False
    return True


def check_system_completely(config_file: Optional[str] = None, tolerance: float = 1e-9) -> bool:
    """Run every check and render the results"""
    console.print("🔍 COMPLETE SYSTEM CHECK", style="bold blue")
    console.print("=" * 60)

    console.print("\n1️⃣ Initializing system...", style="yellow")
    container = ServiceContainer(config_file)
    services = container.list_services()
    console.print(f"✅ Services: {', '.join(services)}", style="green")

    console.print("\n2️⃣ Checking closed-form families...", style="yellow")
    table = Table(title="Closed-form checks")
    for column in ("family", "m", "spectrum err", "stationary err", "mean err", "status"):
        table.add_column(column)

    rows: List[dict] = []
    for spec in CHECK_FAMILIES:
        try:
            rows.append(check_family(spec, tolerance))
        except ChainAnalysisError as e:
            console.print(f"❌ {spec.label()}: {type(e).__name__}: {e}", style="red")
            rows.append({"family": spec.label(), "m": 0, "spectrum_error": float("nan"),
                         "stationary_error": float("nan"), "mean_error": float("nan"), "ok": False})

    for row in rows:
        table.add_row(
            row["family"], str(row["m"]),
            f"{row['spectrum_error']:.2e}", f"{row['stationary_error']:.2e}", f"{row['mean_error']:.2e}",
            "✅" if row["ok"] else "❌",
        )
    console.print(table)

    console.print("\n3️⃣ Checking uniformization against the closed-form tail...", style="yellow")
    lagrange_ok = check_lagrange(1e-8)
    console.print("✅ Tails agree" if lagrange_ok else "❌ Tails disagree",
                  style="green" if lagrange_ok else "red")

    healthy = all(row["ok"] for row in rows) and lagrange_ok
    console.print("\n" + "=" * 60)
    if healthy:
        console.print("🎉 SYSTEM CHECK PASSED", style="bold green")
    else:
        console.print("❌ SYSTEM CHECK FAILED", style="bold red")
    return healthy


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Birth-and-death analyzer system check")
    parser.add_argument("--config", help="Configuration file path")
    parser.add_argument("--tolerance", type=float, default=1e-9)
    args = parser.parse_args(argv)
    try:
        return 0 if check_system_completely(args.config, args.tolerance) else 1
    except Exception as e:
        console.print(f"💥 System check failed: {e}", style="red")
        return 1


if __name__ == "__main__":
    sys.exit(main())
