#!/usr/bin/env python3
"""
Analysis Orchestrator
Runs CLI commands against the services with uniform error handling
"""

import logging
import math
import time
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn

from models.command_models import Command
from models.data_models import BirthDeathChain, Spectrum
from models.errors import ChainAnalysisError, InvalidParams
from models.report_models import FamilySpec, ScanThresholds, ServiceResult
from services import cutoff_service, distance_service, family_service, hitting_time_service
from services.chain_service import is_monotone
from services.service_container import ServiceContainer
from services.spectral_service import closed_form_spectrum, eigenvalues

console = Console(stderr=True)
logger = logging.getLogger(__name__)

DEFAULT_BOUND_GRID = (0.1, 0.25, 0.5, 1.0, 2.0)


@dataclass
class AnalysisSource:
    """Resolved input: a chain (when known), its spectrum and the family spec"""
    spectrum: Spectrum
    chain: Optional[BirthDeathChain] = None
    family: Optional[FamilySpec] = None


class AnalysisOrchestrator:
    """Command runner with dependency injection"""

    def __init__(self, service_container: ServiceContainer):
        """Initialize with service container"""
        self.services = service_container
        self.config = service_container.configuration

        self.spectral_options = {
            "relative_tolerance": float(service_container.setting('spectral', 'relative_tolerance', 1e-15)),
            "max_iterations": int(service_container.setting('spectral', 'max_iterations', 200)),
            "zero_tolerance": float(service_container.setting('spectral', 'zero_tolerance', 1e-9)),
        }
        self.poisson_tail = float(service_container.setting('hitting', 'poisson_tail', 1e-12))
        self.distance_tail = float(service_container.setting('distances', 'poisson_tail', 1e-12))
        self.mixing_rtol = float(service_container.setting('cutoff', 'mixing_rtol', 1e-9))
        self.bracket_width = float(service_container.setting('cutoff', 'bracket_width', 60.0))
        self.centering = str(service_container.setting('cutoff', 'gumbel_centering', 'mean'))
        self.curve_points = int(service_container.setting('output', 'curve_points', 50))
        self.profile_grid = list(service_container.setting('output', 'profile_grid', [-4.0, 4.0, 81]))
        self.default_jobs = int(service_container.setting('scan', 'jobs', 1))

        self._handlers = {
            "spectrum": self._spectrum,
            "sep-curve": self._sep_curve,
            "mix-time": self._mix_time,
            "stats": self._stats,
            "compare-distances": self._compare_distances,
            "scan": self._scan,
            "profile": self._profile,
        }

    def execute(self, command: Command) -> ServiceResult:
        """Run one command and write its output"""
        started = time.time()
        try:
            payload = self._handlers[command.verb](command)
            if isinstance(payload, list):
                self.services.reports.write_rows(payload, command.output, command.fmt)
            else:
                self.services.reports.write_report(payload, command.output, command.fmt)
            result = ServiceResult.success_result(data=payload, metadata={"verb": command.verb})
        except ChainAnalysisError as e:
            error_msg = f"{type(e).__name__}: {e}"
            console.print(f"❌ {error_msg}", style="red")
            result = ServiceResult.error_result(error_msg, kind="domain", metadata={"verb": command.verb})
        except OSError as e:
            error_msg = f"I/O error: {e}"
            console.print(f"❌ {error_msg}", style="red")
            result = ServiceResult.error_result(error_msg, kind="io", metadata={"verb": command.verb})
        result.processing_time = time.time() - started
        return result

    # input resolution

    def _eigenvalues(self, chain: BirthDeathChain) -> Spectrum:
        return eigenvalues(chain, **self.spectral_options)

    def load_source(self, command: Command) -> AnalysisSource:
        source = command.source
        if source == "chain":
            chain = self.services.files.load_chain(command.chain_file)
            return AnalysisSource(spectrum=self._eigenvalues(chain), chain=chain)
        if source == "spectrum":
            return AnalysisSource(spectrum=self.services.files.load_spectrum(command.spectrum_file))

        spec = command.family or command.family_points[0]
        if command.family_points and len(command.family_points) > 1:
            raise InvalidParams(f"'{command.verb}' takes a single family spec")
        chain = family_service.build(spec)
        if command.options.get("closed_form"):
            spectrum = closed_form_spectrum(spec)
        else:
            spectrum = self._eigenvalues(chain)
        return AnalysisSource(spectrum=spectrum, chain=chain, family=spec)

    def _time_grid(self, command: Command, spectrum: Spectrum, mode: str) -> List[float]:
        times = command.options.get("times")
        if times:
            values = [float(t) for t in times]
        else:
            mean = hitting_time_service.moments(spectrum, mode).mean
            t_max = command.options.get("t_max") or 3.0 * mean
            points = int(command.options.get("points") or self.curve_points)
            values = np.linspace(0.0, float(t_max), max(points, 2)).tolist()
        if any(t < 0 for t in values):
            raise InvalidParams("times must be nonnegative")
        if mode == "discrete":
            steps = []
            for t in values:
                k = int(round(t))
                if k not in steps:
                    steps.append(k)
            return steps
        return values

    def _warn_discrete(self, source: AnalysisSource, mode: str, values: Optional[np.ndarray] = None):
        if mode != "discrete":
            return
        if source.chain is not None and not is_monotone(source.chain):
            console.print("⚠️ Chain is not monotone; discrete separation formula does not apply",
                          style="yellow")
        elif values is not None and ((values < 0.0) | (values > 1.0)).any():
            console.print("⚠️ Discrete separation left the unit interval (non-monotone spectrum)",
                          style="yellow")

    # verbs

    def _spectrum(self, command: Command) -> List[Dict[str, Any]]:
        source = self.load_source(command)
        return source.spectrum.to_rows()

    def _sep_curve(self, command: Command) -> List[Dict[str, Any]]:
        source = self.load_source(command)
        mode = command.options.get("mode", "continuous")
        grid = self._time_grid(command, source.spectrum, mode)
        if mode == "discrete":
            values = np.asarray(hitting_time_service.sep_discrete_curve(source.spectrum, grid))
        else:
            values = np.array([hitting_time_service.sep_continuous(source.spectrum, t, self.poisson_tail)
                               for t in grid])
        self._warn_discrete(source, mode, values)
        return [{"t": t, "sep": float(s)} for t, s in zip(grid, values)]

    def _mix_time(self, command: Command) -> Dict[str, Any]:
        source = self.load_source(command)
        eps = float(command.options.get("eps", 0.25))
        mode = command.options.get("mode", "continuous")
        stats = cutoff_service.cutoff_stats(source.spectrum)
        report: Dict[str, Any] = {"eps": eps, "mode": mode, "mean_hit": stats.mean_hit,
                                  "window": stats.window, "N": stats.product}
        if mode == "discrete":
            steps = cutoff_service.mixing_time_discrete(source.spectrum, eps)
            self._warn_discrete(source, mode, np.array([hitting_time_service.sep_discrete(source.spectrum, steps)]))
            report["mixing_time"] = steps
            return report

        tau = cutoff_service.mixing_time(source.spectrum, eps, self.mixing_rtol, self.bracket_width)
        bracket = cutoff_service.mixing_bracket(stats, eps)
        report.update({
            "mixing_time": tau,
            "bracket_low": bracket.low,
            "bracket_high": bracket.high,
            "within_bracket": bracket.contains(tau),
            "upper_relative": (1.0 + math.sqrt(1.0 / eps - 1.0)) * stats.mean_hit,
            "N_prime": stats.gap * tau,
        })
        return report

    def _stats(self, command: Command) -> Dict[str, Any]:
        source = self.load_source(command)
        spectrum = source.spectrum
        stats = cutoff_service.cutoff_stats(spectrum)
        bounds = []
        for c in command.options.get("c_grid") or DEFAULT_BOUND_GRID:
            chebyshev = cutoff_service.chebyshev_bounds(stats, c)
            exponential = cutoff_service.exponential_bounds(stats, c)
            bounds.append({
                "c": c,
                "chebyshev_upper": chebyshev.upper,
                "chebyshev_lower": chebyshev.lower,
                "exponential_upper": exponential.upper,
                "exponential_lower": exponential.lower,
                "window_lower": cutoff_service.window_lower_bound(stats, c),
            })
        report = {
            "m": spectrum.m,
            **stats.to_dict(),
            "moments": {
                "continuous": hitting_time_service.moments(spectrum, "continuous").to_dict(),
                "discrete": hitting_time_service.moments(spectrum, "discrete").to_dict(),
            },
            "theta": {str(k): v for k, v in hitting_time_service.theta_profile(spectrum).items()},
            "bounds": bounds,
            "notes": [cutoff_service.PRECUTOFF_NOTE],
        }
        if source.chain is not None:
            report["monotone"] = is_monotone(source.chain)
        if source.family is not None:
            report["family"] = source.family.to_dict()
        return report

    def _compare_distances(self, command: Command) -> List[Dict[str, Any]]:
        source = self.load_source(command)
        if source.chain is None:
            raise InvalidParams("compare-distances needs a chain (--chain or --family)")
        mode = command.options.get("mode", "continuous")
        start = command.options.get("start", "0")
        start_state = source.chain.m if str(start) == "m" else int(start)
        grid = self._time_grid(command, source.spectrum, mode)
        reports = distance_service.compare_distances(
            source.chain, grid, mode=mode, method=command.options.get("method", "direct"),
            start=start_state, tail=self.distance_tail,
        )
        return [{"t": r.time, "sep": r.sep, "tv": r.tv, "l2": r.l2} for r in reports]

    def _scan(self, command: Command) -> Dict[str, Any]:
        points = list(command.family_points) or ([command.family] if command.family else [])
        if command.source != "family":
            raise InvalidParams("scan needs family points (--family with --sizes, or --family-file)")
        thresholds = command.options.get("thresholds") or self.services.thresholds
        jobs = int(command.options.get("jobs") or self.default_jobs)
        mode = command.options.get("mode", "continuous")

        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        ) as progress:
            task = progress.add_task(f"Scanning {len(points)} family points...", total=len(points))
            verdict = cutoff_service.scan_family(
                points, thresholds=thresholds, mode=mode, jobs=jobs,
                on_point=lambda _: progress.update(task, advance=1),
            )

        style = {"cutoff": "green", "no-cutoff": "blue"}.get(verdict.verdict, "yellow")
        console.print(f"📊 Verdict: {verdict.verdict} (shape: {verdict.shape})", style=style)
        return verdict.to_dict()

    def _profile(self, command: Command) -> List[Dict[str, Any]]:
        source = self.load_source(command)
        grid = command.options.get("grid")
        if not grid:
            start, stop, count = self.profile_grid
            grid = np.linspace(float(start), float(stop), int(count))
        centering = command.options.get("centering") or self.centering
        profile = cutoff_service.shape_profile(source.spectrum, grid, centering)

        summary = profile.summary()
        summary_path = command.options.get("summary")
        if summary_path:
            self.services.reports.write_report(summary, summary_path, "json")
        console.print(
            f"📈 sup deviation: gaussian {profile.sup_deviation_gaussian:.4g}, "
            f"gumbel ({centering}) {profile.sup_deviation_gumbel:.4g}",
            style="blue",
        )
        return profile.to_rows()


def thresholds_from_options(base: ScanThresholds, **overrides: Optional[float]) -> ScanThresholds:
    """Thresholds with CLI overrides applied"""
    values = base.to_dict()
    values.update({k: float(v) for k, v in overrides.items() if v is not None})
    return ScanThresholds(**values)
