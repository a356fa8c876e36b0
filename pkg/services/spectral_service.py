#!/usr/bin/env python3
"""
Spectral Service - eigenvalues of I - K by Sturm-sequence bisection

The symmetrized tridiagonal matrix is bisected for all m + 1 eigenvalues at
once: each bisection step runs the LDL^T pivot recurrence over the rows with
the whole vector of shifts, so the Python loop is over rows only.
"""

import logging
import math
from typing import Sequence

import numpy as np

from models.data_models import BirthDeathChain, Spectrum, SymmetricTridiagonal
from models.errors import ConvergenceFailure, InvalidParams, NoClosedForm
from models.report_models import FamilySpec
from services import family_params
from services.chain_service import symmetrize

logger = logging.getLogger(__name__)

RELATIVE_TOLERANCE = 1e-15
MAX_ITERATIONS = 200
ZERO_TOLERANCE = 1e-9
ORDER_SLACK = 1e-13


def sturm_count(matrix: SymmetricTridiagonal, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift"""
    a = matrix.diagonal
    b2 = matrix.offdiagonal ** 2
    pivmin = np.finfo(float).tiny * max(1.0, float(b2.max()) if b2.size else 1.0)

    shifts = np.asarray(shifts, dtype=float)
    d = a[0] - shifts
    d = np.where(np.abs(d) < pivmin, -pivmin, d)
    count = (d < 0).astype(np.int64)
    for i in range(1, a.size):
        d = a[i] - shifts - b2[i - 1] / d
        d = np.where(np.abs(d) < pivmin, -pivmin, d)
        count += d < 0
    return count


def gerschgorin_interval(matrix: SymmetricTridiagonal):
    a = matrix.diagonal
    radius = np.zeros_like(a)
    off = np.abs(matrix.offdiagonal)
    radius[:-1] += off
    radius[1:] += off
    return float((a - radius).min()), float((a + radius).max())


def bisect_all(matrix: SymmetricTridiagonal,
               relative_tolerance: float = RELATIVE_TOLERANCE,
               max_iterations: int = MAX_ITERATIONS) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending"""
    n = matrix.diagonal.size
    low, high = gerschgorin_interval(matrix)
    tolerance = relative_tolerance * max(1.0, abs(low), abs(high))
    # widen so the end eigenvalues are strictly inside
    low -= 2 * tolerance
    high += 2 * tolerance

    index = np.arange(n)
    lo = np.full(n, low)
    hi = np.full(n, high)
    # brackets that no representable midpoint can split are final
    stalled = np.zeros(n, dtype=bool)
    for _ in range(max_iterations):
        mid = 0.5 * (lo + hi)
        stalled |= (mid <= lo) | (mid >= hi)
        active = ((hi - lo) > tolerance) & ~stalled
        if not active.any():
            break
        below = sturm_count(matrix, mid[active])
        idx = index[active]
        # eigenvalue idx lies below mid iff more than idx eigenvalues are below mid
        go_low = below > idx
        hi[idx[go_low]] = mid[active][go_low]
        lo[idx[~go_low]] = mid[active][~go_low]
    else:
        if (((hi - lo) > tolerance) & ~stalled).any():
            raise ConvergenceFailure(
                f"bisection did not reach tolerance {tolerance:.3g} in {max_iterations} steps"
            )
    return 0.5 * (lo + hi)


def check_order(lambdas: np.ndarray, slack: float) -> np.ndarray:
    """Ascending eigenvalues; reversals beyond slack are a failure, ties are reported"""
    steps = np.diff(lambdas)
    if (steps < -slack).any():
        raise ConvergenceFailure("eigenvalues are out of order")
    if (steps < 0).any():
        lambdas = np.sort(lambdas)
        steps = np.diff(lambdas)
    ties = int((steps == 0).sum())
    if ties:
        # distinct in exact arithmetic but closer than double precision resolves
        logger.warning("%d eigenvalue pairs coincide in double precision", ties)
    return lambdas


def eigenvalues(chain: BirthDeathChain,
                relative_tolerance: float = RELATIVE_TOLERANCE,
                max_iterations: int = MAX_ITERATIONS,
                zero_tolerance: float = ZERO_TOLERANCE) -> Spectrum:
    """The m nonzero eigenvalues of I - K.

    The smallest eigenvalue must be zero (constant eigenvector); it is
    checked and dropped. Result is cached on the chain.
    """
    cached = chain._cache.get('spectrum')
    if cached is not None:
        return cached

    values = bisect_all(symmetrize(chain), relative_tolerance, max_iterations)
    scale = max(1.0, float(values[-1]))
    if abs(values[0]) > zero_tolerance * scale:
        raise ConvergenceFailure(f"smallest eigenvalue {values[0]:.3g} is not zero")

    slack = ORDER_SLACK * scale
    if values[1] <= slack:
        raise ConvergenceFailure(f"gap {values[1]:.3g} is not separated from zero")
    lambdas = check_order(values[1:], slack)

    spectrum = Spectrum(lambdas=lambdas)
    chain._cache['spectrum'] = spectrum
    return spectrum


def spectrum_from_values(values: Sequence[float]) -> Spectrum:
    """Spectrum from user supplied eigenvalues (e.g. a spectrum CSV)"""
    lambdas = np.sort(np.asarray(values, dtype=float).ravel())
    if lambdas.size == 0:
        raise InvalidParams("spectrum is empty")
    if not np.isfinite(lambdas).all() or lambdas[0] <= 0.0:
        raise InvalidParams("eigenvalues must be positive and finite")
    if lambdas[-1] > 2.0 + 1e-10:
        raise InvalidParams(f"eigenvalue {lambdas[-1]} exceeds 2")
    return Spectrum(lambdas=lambdas)


def _one_minus_power(q: float, exponent: np.ndarray) -> np.ndarray:
    """1 - q**exponent for exponent <= 0 without cancellation"""
    return -np.expm1(np.asarray(exponent, dtype=float) * math.log(q))


def closed_form_values(spec: FamilySpec) -> np.ndarray:
    """Published eigenvalues of I - K for the family, ascending"""
    params = family_params.validate(spec)
    kind = spec.kind

    if kind == "srw" or (kind == "metropolis" and params["target"] == "uniform"):
        n = params["n"]
        j = np.arange(1, n + 1)
        return 1.0 - np.cos(np.pi * j / (n + 1))

    if kind == "biased_walk":
        n, p, q = params["n"], params["p"], params["q"]
        j = np.arange(1, n + 1)
        return 1.0 - 2.0 * math.sqrt(p * q) * np.cos(np.pi * j / (n + 1))

    if kind == "bernoulli_laplace":
        n, r = params["n"], params["r"]
        i = np.arange(1, r + 1, dtype=float)
        return i * (n - i + 1) / (r * (n - r))

    if kind == "hamming":
        n, r = params["n"], params["r"]
        i = np.arange(1, r + 1, dtype=float)
        return i * n / (r * (n - 1))

    if kind == "theta_hypercube":
        theta, r = params["theta"], params["r"]
        i = np.arange(1, r + 1, dtype=float)
        return i * (1.0 + theta) / r

    if kind == "q_subspace":
        q, n, m = params["q"], params["n"], params["m"]
        i = np.arange(1, m + 1, dtype=float)
        denominator = _one_minus_power(q, m - n) * _one_minus_power(q, -m)
        return _one_minus_power(q, -i) * _one_minus_power(q, i - n - 1) / denominator

    raise NoClosedForm(f"{spec.label()} has no closed-form spectrum")


def closed_form_spectrum(spec: FamilySpec) -> Spectrum:
    return Spectrum(lambdas=np.sort(closed_form_values(spec)))
