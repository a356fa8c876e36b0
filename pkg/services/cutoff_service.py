#!/usr/bin/env python3
"""
Cutoff Service - cut-off statistics, bounds, mixing times, scans and shape profiles

A family of chains started at 0 has a separation cut-off iff N = lambda t
tends to infinity. Over a finite scan this can only be judged by trend, so
verdicts are reported together with the raw N sequence and thresholds.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.optimize import bisect
from scipy.stats import gumbel_r, norm

from models.data_models import Spectrum
from models.errors import ConvergenceFailure, InvalidParams, TooFewPoints
from models.report_models import (
    BoundPair,
    CutoffStats,
    FamilySpec,
    MixingBracket,
    ScanPoint,
    ScanThresholds,
    ScanVerdict,
    ShapeProfile,
)
from services import family_service, hitting_time_service
from services.chain_service import is_monotone
from services.spectral_service import eigenvalues

logger = logging.getLogger(__name__)

MIXING_RTOL = 1e-9
BRACKET_WIDTH = 60.0
MAX_DISCRETE_STEPS = 10 ** 8
PROFILE_LIMIT = 6.0
THETA_ORDERS = 8
PRECUTOFF_NOTE = (
    "precut-off is equivalent to cut-off for birth-and-death chains started at 0, "
    "so this verdict covers both"
)


def cutoff_stats(spectrum: Spectrum) -> CutoffStats:
    moments = hitting_time_service.moments(spectrum, "continuous")
    gap = spectrum.gap
    return CutoffStats(
        gap=gap,
        mean_hit=moments.mean,
        window=math.sqrt(moments.variance),
        product=gap * moments.mean,
        theta2=hitting_time_service.theta(spectrum, 2),
    )


def _positive(c: float) -> float:
    c = float(c)
    if not c > 0:
        raise InvalidParams(f"c must be positive (got {c})")
    return c


def chebyshev_bounds(stats: CutoffStats, c: float) -> BoundPair:
    """sep((1+c)t) <= 1/(1 + c^2 N) and sep((1-c)t) >= 1 - 1/(1 + c^2 N)"""
    c = _positive(c)
    upper = 1.0 / (1.0 + c * c * stats.product)
    return BoundPair(upper=upper, lower=1.0 - upper)


def tau_chebyshev_bounds(stats: CutoffStats, c: float, eps: float, tau: float) -> BoundPair:
    """Chebyshev bounds with N' = lambda tau(eps) in place of N"""
    c = _positive(c)
    eps = _epsilon(eps)
    shrink = 1.0 / (1.0 + math.sqrt(1.0 / eps - 1.0))
    upper = 1.0 / (1.0 + c * c * shrink * stats.gap * tau)
    return BoundPair(upper=upper, lower=1.0 - upper)


def exponential_bounds(stats: CutoffStats, c: float) -> BoundPair:
    """sep(t + a sigma) <= exp(-(a - 1/2)/2) with a = c t / sigma, and the mirror lower bound.

    a >= c sqrt(N) always; the exponent is not improved to c N because
    t / sigma can be as small as sqrt(N).
    """
    c = _positive(c)
    a = c * stats.mean_hit / stats.window
    upper = min(1.0, math.exp(-(a - 0.5) / 2.0))
    return BoundPair(upper=upper, lower=1.0 - upper)


def window_lower_bound(stats: CutoffStats, c: float) -> float:
    """sep(t + c sigma) >= exp(-(1 + (c+1) lambda sigma)) / 2"""
    c = float(c)
    if c < 0:
        raise InvalidParams(f"c must be nonnegative (got {c})")
    return 0.5 * math.exp(-(1.0 + (c + 1.0) * stats.gap * stats.window))


def _epsilon(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise InvalidParams(f"eps must lie in (0, 1) (got {eps})")
    return eps


def mixing_bracket(stats: CutoffStats, eps: float) -> MixingBracket:
    """t - (1/eps - 1)^(-1/2) sigma <= tau(eps) <= t + (1/eps - 1)^(1/2) sigma"""
    eps = _epsilon(eps)
    ratio = 1.0 / eps - 1.0
    return MixingBracket(
        low=stats.mean_hit - stats.window / math.sqrt(ratio),
        high=stats.mean_hit + math.sqrt(ratio) * stats.window,
    )


def mixing_time(spectrum: Spectrum, eps: float, rtol: float = MIXING_RTOL,
                bracket_width: float = BRACKET_WIDTH) -> float:
    """The t with sep(t) = eps in continuous time"""
    eps = _epsilon(eps)
    stats = cutoff_stats(spectrum)

    def excess(t: float) -> float:
        return hitting_time_service.sep_continuous(spectrum, t) - eps

    high = stats.mean_hit + bracket_width * stats.window
    while excess(high) > 0:
        high *= 2.0
    return float(bisect(excess, 0.0, high, xtol=1e-15 * high, rtol=rtol, maxiter=500))


def mixing_time_discrete(spectrum: Spectrum, eps: float) -> int:
    """inf{k : sep(mu^k, nu) <= eps} from the discrete law of T"""
    eps = _epsilon(eps)
    mean = hitting_time_service.moments(spectrum, "discrete").mean
    k_max = max(16, int(2 * mean))
    while True:
        tail = hitting_time_service.discrete_tail(spectrum, k_max)
        hits = np.flatnonzero(tail <= eps)
        if hits.size:
            return int(hits[0])
        if k_max > MAX_DISCRETE_STEPS:
            raise ConvergenceFailure(f"separation stays above {eps} for {k_max} steps")
        k_max *= 2


def _evaluate_point(spec: FamilySpec) -> ScanPoint:
    chain = family_service.build(spec)
    spectrum = eigenvalues(chain)
    return ScanPoint(
        param=spec.size_parameter,
        m=chain.m,
        stats=cutoff_stats(spectrum),
        thetas=hitting_time_service.theta_profile(spectrum, THETA_ORDERS),
        monotone=is_monotone(chain),
        label=spec.label(),
    )


def _increasing_tail(values: Sequence[float]) -> bool:
    tail = np.asarray(values[(len(values) - 1) // 2:], dtype=float)
    return bool(np.all(np.diff(tail) > 0))


def classify(points: List[ScanPoint], thresholds: ScanThresholds,
             mode: str = "continuous") -> ScanVerdict:
    """Verdict and shape from already evaluated points"""
    trend = [point.stats.product for point in points]
    notes = [PRECUTOFF_NOTE]

    if mode == "discrete" and not all(point.monotone for point in points):
        notes.append("discrete-time verdicts need monotone chains (p_x + q_{x+1} <= 1)")
        verdict = "inconclusive"
    elif trend[-1] > thresholds.divergence and _increasing_tail(trend):
        verdict = "cutoff"
    elif max(trend) / min(trend) < thresholds.bounded_ratio:
        verdict = "no-cutoff"
    else:
        verdict = "inconclusive"

    if verdict == "cutoff":
        spread = [math.sqrt(point.stats.theta2) for point in points]
        gaussian = spread[-1] > thresholds.gaussian_growth and _increasing_tail(spread)
        shape = "gaussian" if gaussian else "non-gaussian"
    else:
        shape = "n/a"

    return ScanVerdict(family_points=list(points), trend=trend, verdict=verdict, shape=shape,
                       thresholds=thresholds, mode=mode, notes=notes)


def scan_family(points: Sequence[FamilySpec], thresholds: Optional[ScanThresholds] = None,
                mode: str = "continuous", jobs: int = 1,
                on_point: Optional[Callable[[ScanPoint], None]] = None) -> ScanVerdict:
    """Cut-off verdict over family points of increasing size"""
    points = list(points)
    if len(points) < 3:
        raise TooFewPoints(f"a scan needs at least 3 points (got {len(points)})")
    if mode not in ("continuous", "discrete"):
        raise InvalidParams(f"unknown mode '{mode}'")
    sizes = [spec.size_parameter for spec in points]
    if any(size is None for size in sizes):
        raise InvalidParams("every scan point needs its size parameter")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidParams(f"size parameters must increase along the scan (got {sizes})")
    thresholds = thresholds or ScanThresholds()

    def evaluate(spec: FamilySpec) -> ScanPoint:
        point = _evaluate_point(spec)
        if on_point is not None:
            on_point(point)
        return point

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            evaluated = list(executor.map(evaluate, points))
    else:
        evaluated = [evaluate(spec) for spec in points]

    verdict = classify(evaluated, thresholds, mode)
    logger.info("scan of %d points: N %.4g -> %.4g, verdict %s, shape %s",
                len(evaluated), verdict.trend[0], verdict.trend[-1], verdict.verdict, verdict.shape)
    return verdict


def shape_profile(spectrum: Spectrum, grid: Sequence[float], centering: str = "mean") -> ShapeProfile:
    """sep(t + c sigma) against 1 - Phi(c), and sep at the Gumbel centering against 1 - exp(-e^{-c})

    Gumbel scale is 1/lambda. The "mean" centering puts the Gumbel mean on t
    (center t - gamma_E / lambda); "log" uses (1/lambda) log m.
    """
    grid = np.sort(np.asarray(grid, dtype=float).ravel())
    if grid.size == 0:
        raise InvalidParams("profile grid is empty")
    if np.abs(grid).max() > PROFILE_LIMIT:
        raise InvalidParams(f"profile grid must lie within |c| <= {PROFILE_LIMIT:g}")
    if centering not in ("mean", "log"):
        raise InvalidParams(f"unknown Gumbel centering '{centering}'")

    stats = cutoff_stats(spectrum)
    scale = 1.0 / stats.gap
    centers = {
        "mean": stats.mean_hit - np.euler_gamma * scale,
        "log": scale * math.log(spectrum.m) if spectrum.m > 1 else 0.0,
    }

    def sep_at(times: np.ndarray) -> np.ndarray:
        return hitting_time_service.sep_continuous_curve(spectrum, np.maximum(times, 0.0))

    sep_values = sep_at(stats.mean_hit + grid * stats.window)
    gaussian = norm.sf(grid)
    gumbel = gumbel_r.sf(grid)
    deviations = {}
    gumbel_curves = {}
    for name, center in centers.items():
        gumbel_curves[name] = sep_at(center + grid * scale)
        deviations[name] = float(np.max(np.abs(gumbel_curves[name] - gumbel)))

    return ShapeProfile(
        grid=grid,
        sep_values=sep_values,
        reference_gaussian=gaussian,
        reference_gumbel=gumbel,
        sep_gumbel_values=gumbel_curves[centering],
        sup_deviation_gaussian=float(np.max(np.abs(sep_values - gaussian))),
        sup_deviation_gumbel=deviations[centering],
        gaussian_centering={"center": stats.mean_hit, "scale": stats.window},
        gumbel_centering={
            "method": centering,
            "center": float(centers[centering]),
            "scale": scale,
            "mean_center": float(centers["mean"]),
            "log_center": float(centers["log"]),
            "sup_deviation_mean": deviations["mean"],
            "sup_deviation_log": deviations["log"],
        },
    )
