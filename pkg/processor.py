#!/usr/bin/env python3
"""
Main Entry Point - birth-and-death cut-off analyzer

Verbs: spectrum, sep-curve, mix-time, stats, compare-distances, scan, profile.
Data goes to stdout (or --output); status and diagnostics go to stderr.
"""

import argparse
import sys
from typing import List, Optional

from rich.console import Console
from rich.panel import Panel

from models.command_models import Command
from models.errors import ChainAnalysisError, InvalidParams
from models.report_models import FamilySpec
from services.analysis_orchestrator import AnalysisOrchestrator, thresholds_from_options
from services.family_service import family_from_args
from services.service_container import ServiceContainer

console = Console(stderr=True)

FAMILY_PARAMS = ("n", "r", "p", "theta", "q", "m", "d", "target")


def _float_list(text: str) -> List[float]:
    return [float(item) for item in text.replace(',', ' ').split()]


def _add_input_options(parser: argparse.ArgumentParser, spectrum_input: bool = True):
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--chain", help="Chain JSON file {m, p, q, r}")
    source.add_argument("--family", help="Family kind, e.g. srw, biased-walk, bernoulli-laplace")
    source.add_argument("--family-file", help="Family spec JSON {kind, params}")
    if spectrum_input:
        source.add_argument("--spectrum", help="Spectrum CSV with a 'lambda' column")

    params = parser.add_argument_group("family parameters")
    params.add_argument("--n", type=int)
    params.add_argument("--r", type=int)
    params.add_argument("--p", type=float)
    params.add_argument("--theta", type=float)
    params.add_argument("--q", type=int, help="prime power for q-subspace")
    params.add_argument("--m", type=int, help="subspace dimension for q-subspace")
    params.add_argument("--d", type=float, help="exponent of the power Metropolis target")
    params.add_argument("--target", choices=["uniform", "power", "binomial", "explicit"])
    params.add_argument("--weights", type=_float_list, help="explicit Metropolis weights")


def _add_output_options(parser: argparse.ArgumentParser):
    parser.add_argument("--output", "-o", help="Output file (default: stdout)")
    parser.add_argument("--format", dest="fmt", choices=["csv", "json"], help="Output format")


def _add_time_options(parser: argparse.ArgumentParser):
    parser.add_argument("--t", dest="times", type=float, nargs="+", help="Explicit times (steps in discrete mode)")
    parser.add_argument("--t-max", type=float, help="Grid end (default 3 x mean hitting time)")
    parser.add_argument("--points", type=int, help="Grid size")
    parser.add_argument("--mode", choices=["continuous", "discrete"], default="continuous")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Birth-and-Death Cut-off Analyzer")
    parser.add_argument("--config", help="Configuration file path")
    parser.add_argument("--verbose", "-v", action="store_true", help="Show status output")
    verbs = parser.add_subparsers(dest="verb", required=True)

    sub = verbs.add_parser("spectrum", help="Nonzero eigenvalues of I - K")
    _add_input_options(sub, spectrum_input=False)
    sub.add_argument("--closed-form", action="store_true", help="Use the family's closed-form spectrum")
    _add_output_options(sub)

    sub = verbs.add_parser("sep-curve", help="Separation curve sep(t) = P(T > t)")
    _add_input_options(sub)
    _add_time_options(sub)
    _add_output_options(sub)

    sub = verbs.add_parser("mix-time", help="Separation mixing time tau(eps)")
    _add_input_options(sub)
    sub.add_argument("--eps", type=float, default=0.25)
    sub.add_argument("--mode", choices=["continuous", "discrete"], default="continuous")
    _add_output_options(sub)

    sub = verbs.add_parser("stats", help="Cut-off statistics, moments and bounds")
    _add_input_options(sub)
    sub.add_argument("--c", dest="c_grid", type=float, nargs="+", help="Bound offsets c")
    _add_output_options(sub)

    sub = verbs.add_parser("compare-distances", help="sep, TV and L2 by direct evolution")
    _add_input_options(sub, spectrum_input=False)
    _add_time_options(sub)
    sub.add_argument("--start", choices=["0", "m"], default="0")
    sub.add_argument("--method", choices=["direct", "spectral"], default="direct")
    _add_output_options(sub)

    sub = verbs.add_parser("scan", help="Cut-off verdict over a family scan")
    _add_input_options(sub, spectrum_input=False)
    sub.add_argument("--sizes", type=float, nargs="+", help="Values of the family's size parameter")
    sub.add_argument("--n-per-r", type=float, help="Set n = round(factor * r) at each point")
    sub.add_argument("--n-square", action="store_true", help="Set n = r^2 at each point")
    sub.add_argument("--jobs", type=int, help="Parallel workers")
    sub.add_argument("--mode", choices=["continuous", "discrete"], default="continuous")
    sub.add_argument("--divergence", type=float, help="Cut-off threshold on N")
    sub.add_argument("--bounded-ratio", type=float, help="No-cut-off threshold on max N / min N")
    sub.add_argument("--gaussian-growth", type=float, help="Gaussian threshold on lambda * sigma")
    _add_output_options(sub)

    sub = verbs.add_parser("profile", help="Cut-off shape against Gaussian and Gumbel tails")
    _add_input_options(sub)
    sub.add_argument("--c", dest="grid", type=float, nargs="+", help="Explicit c grid")
    sub.add_argument("--centering", choices=["mean", "log"], help="Gumbel centering")
    sub.add_argument("--summary", help="Write the deviation summary JSON here")
    _add_output_options(sub)

    return parser


def _family_params(args: argparse.Namespace) -> dict:
    params = {key: getattr(args, key, None) for key in FAMILY_PARAMS}
    if getattr(args, "weights", None):
        params["weights"] = args.weights
        params["target"] = params["target"] or "explicit"
    return params


def _scan_points(args: argparse.Namespace, container: ServiceContainer) -> List[FamilySpec]:
    if args.family_file:
        return container.files.load_family_specs(args.family_file)
    if not args.family:
        return []
    base = family_from_args(args.family, **_family_params(args))
    if not args.sizes:
        raise InvalidParams("scan with --family needs --sizes")
    key = FamilySpec.SIZE_KEYS.get(base.kind)
    if key is None:
        raise InvalidParams(f"unknown family kind '{args.family}'")
    points = []
    for size in args.sizes:
        params = dict(base.params)
        params[key] = int(size) if float(size).is_integer() else size
        if key == "r" and args.n_square:
            params["n"] = int(params["r"]) ** 2
        elif key == "r" and args.n_per_r:
            params["n"] = int(round(args.n_per_r * params["r"]))
        points.append(FamilySpec(kind=base.kind, params=params))
    return points


def build_command(args: argparse.Namespace, container: ServiceContainer) -> Command:
    options = {}
    for key in ("times", "t_max", "points", "mode", "eps", "c_grid", "start", "method",
                "jobs", "grid", "centering", "summary", "closed_form"):
        value = getattr(args, key, None)
        if value is not None:
            options[key] = value

    command = Command(verb=args.verb, chain_file=args.chain,
                      spectrum_file=getattr(args, "spectrum", None),
                      output=args.output, fmt=args.fmt, options=options)

    if args.verb == "scan":
        command.family_points = _scan_points(args, container)
        options["thresholds"] = thresholds_from_options(
            container.thresholds,
            divergence=args.divergence,
            bounded_ratio=args.bounded_ratio,
            gaussian_growth=args.gaussian_growth,
        )
    elif args.family_file:
        command.family_points = container.files.load_family_specs(args.family_file)
    elif args.family:
        command.family = family_from_args(args.family, **_family_params(args))
    return command


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 0 on --help and 2 on a usage error
        return 0 if e.code in (0, None) else 1

    try:
        if args.verbose:
            console.print(Panel.fit("🚀 Birth-and-Death Cut-off Analyzer", style="bold blue"))

        service_container = ServiceContainer(args.config, verbose=args.verbose)
        orchestrator = AnalysisOrchestrator(service_container)
        command = build_command(args, service_container)
        result = orchestrator.execute(command)

        if result.success and args.verbose:
            console.print(f"✅ {args.verb} completed in {result.processing_time:.2f}s", style="green")
        return result.exit_code

    except ChainAnalysisError as e:
        console.print(f"❌ {type(e).__name__}: {e}", style="red")
        return 1

    except OSError as e:
        console.print(f"❌ I/O error: {e}", style="red")
        return 2

    except KeyboardInterrupt:
        console.print("\n⚠️ Interrupted by user", style="yellow")
        return 1

    except Exception as e:
        console.print(f"💥 Unexpected error: {str(e)}", style="red")
        return 1


if __name__ == "__main__":
    sys.exit(main())
