#!/usr/bin/env python3
"""
Hitting Time Service - law of the strong stationary time T = S_1 + ... + S_m

sep(t) = P(T > t). Continuous time evaluates the hypoexponential tail by
uniformization of the pure-birth phase chain. Discrete time runs an exact
recursion over the phase generating functions.
"""

import logging
import math
from typing import Dict, Iterable, Tuple

import mpmath
import numpy as np
from scipy.stats import poisson

from models.data_models import HittingTimeLaw, Moments, Spectrum
from models.errors import InvalidParams, OutsideRadius, PrecisionLoss

logger = logging.getLogger(__name__)

POISSON_TAIL = 1e-12
LAGRANGE_CAP = 60
LAGRANGE_DPS = 50
LAGRANGE_BUDGET = 1e-8
PAIRING_SLACK = 1e-12
EXTEND_BLOCK = 256


def hitting_law(spectrum: Spectrum, mode: str = "continuous") -> HittingTimeLaw:
    """Cached law object for spectrum and mode"""
    key = f"law_{mode}"
    law = spectrum._cache.get(key)
    if law is None:
        law = spectrum._cache.setdefault(key, HittingTimeLaw(spectrum=spectrum, mode=mode))
    return law


# continuous time

def _extend_survival(law: HittingTimeLaw, k_max: int) -> np.ndarray:
    """Extend s_0..s_k_max of the uniformized phase chain"""
    with law.lock:
        have = law.tail.size - 1
        if k_max <= have:
            return law.tail
        state = law.state
        if not state:
            lambdas = law.spectrum.lambdas
            advance = lambdas / lambdas[-1]
            state['advance'] = advance[:-1].copy()
            state['stay'] = 1.0 - advance
            vector = np.zeros(lambdas.size)
            vector[0] = 1.0
            state['vector'] = vector

        stay = state['stay']
        advance = state['advance']
        vector = state['vector']
        k_max = max(k_max, have + EXTEND_BLOCK)
        block = np.empty(k_max - have)
        for step in range(block.size):
            moved = advance * vector[:-1]
            vector = stay * vector
            vector[1:] += moved
            block[step] = vector.sum()
        state['vector'] = vector
        law.tail = np.concatenate([law.tail, block])
        return law.tail


def poisson_window(mean: float, tail: float = POISSON_TAIL) -> Tuple[int, int]:
    """Jump counts carrying all but tail of the Poisson(mean) mass"""
    if mean <= 0.0:
        return 0, 0
    low = max(0, int(poisson.ppf(tail / 2, mean)))
    high = int(poisson.isf(tail / 2, mean)) + 1
    return low, high


def sep_continuous(spectrum: Spectrum, t: float, tail: float = POISSON_TAIL) -> float:
    """P(T > t) with T hypoexponential with rates lambda_1..lambda_m"""
    if t < 0:
        raise InvalidParams(f"time must be nonnegative (got {t})")
    if t == 0:
        return 1.0

    law = hitting_law(spectrum, "continuous")
    mean = spectrum.largest * t
    low, high = poisson_window(mean, tail)
    survival = _extend_survival(law, high)

    jumps = np.arange(low, high + 1)
    weights = poisson.pmf(jumps, mean)
    value = float(np.dot(weights, survival[low:high + 1]))
    if low > 0:
        # survival is within tail/2 of 1 below the window
        value += float(poisson.cdf(low - 1, mean))
    return min(1.0, max(0.0, value))


def sep_continuous_curve(spectrum: Spectrum, times: Iterable[float],
                         tail: float = POISSON_TAIL) -> np.ndarray:
    return np.array([sep_continuous(spectrum, float(t), tail) for t in times])


# discrete time

def _discrete_units(lambdas: np.ndarray) -> Dict[str, np.ndarray]:
    """Recursion coefficients per unit.

    A unit is a geometric phase (lambda <= 1) or a pair (a, b) with b > 1,
    a <= 1 and a + b <= 2, whose duration law ab h_{d-2}(1-a, 1-b) is
    nonnegative. Unpairable lambda > 1 stay signed geometric phases.
    """
    small = sorted((float(x) for x in lambdas if x <= 1.0), reverse=True)
    large = sorted((float(x) for x in lambdas if x > 1.0), reverse=True)

    c1, c2, g1, g2 = [], [], [], []
    unpaired = []
    for b in large:
        limit = 2.0 - b + PAIRING_SLACK
        choice = next((i for i, a in enumerate(small) if a <= limit), None)
        if choice is None:
            unpaired.append(b)
            continue
        a = small.pop(choice)
        alpha, beta = 1.0 - a, 1.0 - b
        c1.append(alpha + beta)
        c2.append(-alpha * beta)
        g1.append(0.0)
        g2.append(a * b)

    for lam in small + unpaired:
        c1.append(1.0 - lam)
        c2.append(0.0)
        g1.append(lam)
        g2.append(0.0)

    if unpaired:
        logger.warning(
            "%d eigenvalues above 1 could not be paired; discrete separation uses "
            "signed phases and may leave [0, 1] (chain is not monotone?)", len(unpaired)
        )
    return {
        "c1": np.array(c1), "c2": np.array(c2),
        "g1": np.array(g1), "g2": np.array(g2),
        "signed": bool(unpaired),
    }


def _extend_discrete(law: HittingTimeLaw, k_max: int) -> np.ndarray:
    """Extend P(T > 0..k_max)"""
    with law.lock:
        have = law.tail.size - 1
        if k_max <= have:
            return law.tail
        state = law.state
        if not state:
            state.update(_discrete_units(law.spectrum.lambdas))
            units = state['c1'].size
            current = np.zeros(units)
            current[0] = 1.0
            state['current'] = current          # w_k
            state['previous'] = np.zeros(units)  # w_{k-1}
            state['finished'] = 0.0

        c1, c2, g1, g2 = state['c1'], state['c2'], state['g1'], state['g2']
        current, previous = state['current'], state['previous']
        finished = state['finished']
        k_max = max(k_max, have + EXTEND_BLOCK)
        block = np.empty(k_max - have)
        for step in range(block.size):
            outflow = g1 * current + g2 * previous
            arrivals = np.empty_like(current)
            arrivals[0] = 0.0
            arrivals[1:] = outflow[:-1]
            finished += outflow[-1]
            nxt = c1 * current + c2 * previous + arrivals
            previous, current = current, nxt
            block[step] = 1.0 - finished
        state['current'], state['previous'], state['finished'] = current, previous, finished
        law.tail = np.concatenate([law.tail, block])
        return law.tail


def sep_discrete(spectrum: Spectrum, k: int) -> float:
    """P(T > k) for the discrete-time law of T (monotone chains)"""
    k = int(k)
    if k < 0:
        raise InvalidParams(f"step count must be nonnegative (got {k})")
    law = hitting_law(spectrum, "discrete")
    value = float(_extend_discrete(law, k)[k])
    if law.state.get('signed'):
        return value
    return min(1.0, max(0.0, value))


def sep_discrete_curve(spectrum: Spectrum, steps: Iterable[int]) -> np.ndarray:
    return np.array([sep_discrete(spectrum, int(k)) for k in steps])


def discrete_tail(spectrum: Spectrum, k_max: int) -> np.ndarray:
    """P(T > k) for k = 0..k_max"""
    law = hitting_law(spectrum, "discrete")
    values = _extend_discrete(law, int(k_max))[:int(k_max) + 1]
    if law.state.get('signed'):
        return values.copy()
    return np.clip(values, 0.0, 1.0)


# explicit spectral sums

def _lagrange_terms(spectrum: Spectrum, factor, cap: int, dps: int):
    lambdas = spectrum.lambdas
    if lambdas.size > cap:
        raise PrecisionLoss(f"m = {lambdas.size} exceeds the spectral-sum cap {cap}")
    if (np.diff(lambdas) <= 0).any():
        raise PrecisionLoss("eigenvalues are not distinct in double precision")

    with mpmath.workdps(dps):
        lam = [mpmath.mpf(float(x)) for x in lambdas]
        terms = []
        for i, li in enumerate(lam):
            coefficient = mpmath.mpf(1)
            for j, lj in enumerate(lam):
                if j != i:
                    coefficient *= lj / (lj - li)
            terms.append(coefficient * factor(li))
        total = mpmath.fsum(terms)
        magnitude = mpmath.fsum(abs(term) for term in terms)
        return total, magnitude


def _checked(total, magnitude, dps: int, budget: float) -> float:
    error = float(magnitude) * 10.0 ** (1 - dps)
    if error > budget:
        raise PrecisionLoss(f"estimated cancellation error {error:.2e} exceeds {budget:.0e}")
    return float(total)


def lagrange_tail(spectrum: Spectrum, t: float, cap: int = LAGRANGE_CAP,
                  dps: int = LAGRANGE_DPS, budget: float = LAGRANGE_BUDGET) -> float:
    """sum_i prod_{j != i} lambda_j / (lambda_j - lambda_i) exp(-t lambda_i)"""
    if t < 0:
        raise InvalidParams(f"time must be nonnegative (got {t})")
    with mpmath.workdps(dps):
        time = mpmath.mpf(float(t))
        total, magnitude = _lagrange_terms(spectrum, lambda li: mpmath.exp(-time * li), cap, dps)
    return _checked(total, magnitude, dps, budget)


def lagrange_tail_discrete(spectrum: Spectrum, k: int, cap: int = LAGRANGE_CAP,
                           dps: int = LAGRANGE_DPS, budget: float = LAGRANGE_BUDGET) -> float:
    """sum_i prod_{j != i} lambda_j / (lambda_j - lambda_i) (1 - lambda_i)^k"""
    k = int(k)
    if k < 0:
        raise InvalidParams(f"step count must be nonnegative (got {k})")
    total, magnitude = _lagrange_terms(spectrum, lambda li: (1 - li) ** k, cap, dps)
    return _checked(total, magnitude, dps, budget)


# moments and MGF diagnostics

def moments(spectrum: Spectrum, mode: str = "continuous") -> Moments:
    lambdas = spectrum.lambdas
    mean = math.fsum(1.0 / lambdas)
    if mode == "continuous":
        variance = math.fsum(lambdas ** -2.0)
    elif mode == "discrete":
        variance = math.fsum((1.0 - lambdas) / lambdas ** 2)
    else:
        raise InvalidParams(f"unknown mode '{mode}'")
    return Moments(mean=mean, variance=variance)


def theta(spectrum: Spectrum, k: int) -> float:
    """theta_k = sum_i (lambda_1 / lambda_i)^k"""
    if k < 2:
        raise InvalidParams(f"theta needs k >= 2 (got {k})")
    ratios = spectrum.gap / spectrum.lambdas
    return math.fsum(ratios ** k)


def theta_profile(spectrum: Spectrum, k_max: int = 8) -> Dict[int, float]:
    return {k: theta(spectrum, k) for k in range(2, k_max + 1)}


def _cubic_excess(y: np.ndarray) -> np.ndarray:
    """-log(1 - y) - y - y^2/2, accurate for small |y|"""
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    small = np.abs(y) < 1e-2
    ys = y[small]
    series = np.zeros_like(ys)
    power = ys ** 3
    for k in range(3, 12):
        series += power / k
        power = power * ys
    out[small] = series
    yl = y[~small]
    out[~small] = -np.log1p(-yl) - yl - 0.5 * yl ** 2
    return out


def standardized_log_mgf(spectrum: Spectrum, u: float) -> float:
    """F(u) = log E exp(u (T - E T) / sigma) in continuous time"""
    stats = moments(spectrum, "continuous")
    sigma = math.sqrt(stats.variance)
    radius = sigma * spectrum.gap
    if abs(u) >= radius:
        raise OutsideRadius(f"|u| = {abs(u)} is not below the radius {radius:.6g}")
    if u == 0:
        return 0.0
    y = u / (spectrum.lambdas * sigma)
    return 0.5 * u * u + math.fsum(_cubic_excess(y))


def mgf_envelope(spectrum: Spectrum, u: float) -> float:
    """Upper bound sum_{k>=3} u^k / (k theta_2^{(k-2)/2}) for F(u) - u^2/2, 0 < u < 1"""
    theta2 = theta(spectrum, 2)
    x = u / math.sqrt(theta2)
    if not 0 <= x < 1:
        raise OutsideRadius(f"envelope needs 0 <= u < sqrt(theta_2) (got u = {u})")
    return theta2 * float(_cubic_excess(np.array([x]))[0])
