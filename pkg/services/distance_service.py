#!/usr/bin/env python3
"""
Distance Service - exact evolution of the chain and direct distances to stationarity
"""

import logging
import math
from typing import Iterable, Iterator, List

import numpy as np
from scipy.stats import poisson

from models.data_models import BirthDeathChain, DistributionAtTime, StationaryDistribution
from models.errors import InvalidParams
from models.report_models import DistanceReport
from services import hitting_time_service
from services.chain_service import is_monotone, stationary
from services.spectral_service import eigenvalues

logger = logging.getLogger(__name__)

POISSON_TAIL = 1e-12
POWER_BLOCK = 1024


def _start_vector(chain: BirthDeathChain, start: int) -> np.ndarray:
    if start not in (0, chain.m):
        raise InvalidParams(f"start must be 0 or m = {chain.m} (got {start})")
    vector = np.zeros(chain.size)
    vector[start] = 1.0
    return vector


def step(chain: BirthDeathChain, vector: np.ndarray) -> np.ndarray:
    """One step of the row vector: vector K"""
    out = vector * chain.r
    out[1:] += vector[:-1] * chain.p
    out[:-1] += vector[1:] * chain.q
    return out


def evolve_discrete(chain: BirthDeathChain, k: int, start: int = 0) -> DistributionAtTime:
    """mu^k = delta_start K^k"""
    k = int(k)
    if k < 0:
        raise InvalidParams(f"step count must be nonnegative (got {k})")
    vector = _start_vector(chain, start)
    for _ in range(k):
        vector = step(chain, vector)
    return DistributionAtTime(probs=vector, time=k, mode="discrete", start=start)


def evolve_discrete_many(chain: BirthDeathChain, steps: Iterable[int],
                         start: int = 0) -> List[DistributionAtTime]:
    """mu^k for every k in steps, in one pass; output follows input order"""
    steps = [int(k) for k in steps]
    if any(k < 0 for k in steps):
        raise InvalidParams("step counts must be nonnegative")
    wanted = set(steps)
    vector = _start_vector(chain, start)
    found = {}
    for k in range(max(steps, default=0) + 1):
        if k in wanted:
            found[k] = vector
        vector = step(chain, vector)
    return [DistributionAtTime(probs=found[k], time=k, mode="discrete", start=start) for k in steps]


def _powers(chain: BirthDeathChain, start: int) -> Iterator[np.ndarray]:
    vector = _start_vector(chain, start)
    while True:
        yield vector
        vector = step(chain, vector)


def evolve_continuous_many(chain: BirthDeathChain, times: Iterable[float], start: int = 0,
                           tail: float = POISSON_TAIL) -> List[DistributionAtTime]:
    """gamma^t = sum_k e^{-t} t^k / k! mu^k for each t, truncated to discard < tail"""
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise InvalidParams("times must be nonnegative")

    windows = [hitting_time_service.poisson_window(t, tail) for t in times]
    weights = [poisson.pmf(np.arange(low, high + 1), t) if t > 0 else np.ones(1)
               for t, (low, high) in zip(times, windows)]
    k_max = max((high for _, high in windows), default=0)
    result = [np.zeros(chain.size) for _ in times]

    powers = _powers(chain, start)
    for block_start in range(0, k_max + 1, POWER_BLOCK):
        block_end = min(k_max + 1, block_start + POWER_BLOCK)
        block = np.array([next(powers) for _ in range(block_end - block_start)])
        for index, (low, high) in enumerate(windows):
            lo, hi = max(low, block_start), min(high, block_end - 1)
            if lo > hi:
                continue
            result[index] += weights[index][lo - low:hi - low + 1] @ block[lo - block_start:hi - block_start + 1]
    return [DistributionAtTime(probs=probs, time=t, mode="continuous", start=start)
            for probs, t in zip(result, times)]


def evolve_continuous(chain: BirthDeathChain, t: float, start: int = 0,
                      tail: float = POISSON_TAIL) -> DistributionAtTime:
    """gamma^t = exp(t (K - I)) applied to delta_start"""
    if t < 0:
        raise InvalidParams(f"time must be nonnegative (got {t})")
    return evolve_continuous_many(chain, [t], start, tail)[0]


def _check_support(dist: DistributionAtTime, nu: StationaryDistribution):
    if dist.probs.size != nu.nu.size:
        raise InvalidParams(f"support sizes differ ({dist.probs.size} vs {nu.nu.size})")


def separation_direct(dist: DistributionAtTime, nu: StationaryDistribution) -> float:
    """max_x 1 - dist(x) / nu(x), clamped to [0, 1]"""
    _check_support(dist, nu)
    value = float(np.max(1.0 - dist.probs / nu.nu))
    return min(1.0, max(0.0, value))


def total_variation(dist: DistributionAtTime, nu: StationaryDistribution) -> float:
    _check_support(dist, nu)
    return min(1.0, 0.5 * math.fsum(np.abs(dist.probs - nu.nu)))


def l2_distance(dist: DistributionAtTime, nu: StationaryDistribution) -> float:
    """(sum_x |dist(x)/nu(x) - 1|^2 nu(x))^(1/2)"""
    _check_support(dist, nu)
    ratio = dist.probs / nu.nu - 1.0
    return math.sqrt(math.fsum(ratio * ratio * nu.nu))


def _report(chain: BirthDeathChain, dist: DistributionAtTime, method: str,
            tail: float = POISSON_TAIL) -> DistanceReport:
    nu = stationary(chain)
    tv = total_variation(dist, nu)
    if method == "spectral":
        spectrum = eigenvalues(chain)
        if dist.mode == "discrete":
            sep = hitting_time_service.sep_discrete(spectrum, int(dist.time))
        else:
            sep = hitting_time_service.sep_continuous(spectrum, dist.time, tail)
    else:
        sep = separation_direct(dist, nu)
    return DistanceReport(sep=sep, tv=tv, l2=l2_distance(dist, nu), time=dist.time,
                          method=method, mode=dist.mode)


def compare_distances(chain: BirthDeathChain, times: Iterable[float], mode: str = "continuous",
                      method: str = "direct", start: int = 0,
                      tail: float = POISSON_TAIL) -> List[DistanceReport]:
    """Distance reports along a time grid (steps in discrete mode)"""
    if method not in ("direct", "spectral"):
        raise InvalidParams(f"unknown method '{method}'")
    if method == "spectral" and mode == "discrete" and not is_monotone(chain):
        logger.warning("discrete spectral separation assumes a monotone chain")
    if mode == "continuous":
        dists = evolve_continuous_many(chain, times, start, tail)
    elif mode == "discrete":
        dists = evolve_discrete_many(chain, times, start)
    else:
        raise InvalidParams(f"unknown mode '{mode}'")
    return [_report(chain, dist, method, tail) for dist in dists]


def distance_report(chain: BirthDeathChain, t: float, mode: str = "continuous",
                    method: str = "direct", start: int = 0,
                    tail: float = POISSON_TAIL) -> DistanceReport:
    return compare_distances(chain, [t], mode, method, start, tail)[0]
