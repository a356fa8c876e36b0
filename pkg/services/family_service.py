#!/usr/bin/env python3
"""
Family Service - parametric birth-and-death chain families with closed-form spectra
"""

import logging
import math
from typing import Any, Dict, Sequence

import numpy as np
from scipy.special import gammaln

from models.data_models import BirthDeathChain
from models.errors import ConvergenceFailure, InvalidParams, NonPositiveTarget
from models.report_models import FamilySpec
from services import family_params
from services.chain_service import build_chain
from services.spectral_service import closed_form_values, eigenvalues

logger = logging.getLogger(__name__)

SPECTRUM_CHECK_TOLERANCE = 1e-10


def _from_up_down(p: np.ndarray, q: np.ndarray) -> BirthDeathChain:
    """Chain with holding set to the leftover row mass"""
    r = np.ones(p.size + 1)
    r[:-1] -= p
    r[1:] -= q
    return build_chain(p, q, np.clip(r, 0.0, 1.0))


def srw(n: int) -> BirthDeathChain:
    """Simple walk on {0..n} with holding 1/2 at both ends"""
    half = np.full(n, 0.5)
    return _from_up_down(half, half)


def biased_walk(p: float, n: int) -> BirthDeathChain:
    """Walk with up-rate p, down-rate q = 1 - p and holding at the ends"""
    return _from_up_down(np.full(n, p), np.full(n, 1.0 - p))


def bernoulli_laplace(n: int, r: int) -> BirthDeathChain:
    """Number of swapped balls between urns of sizes r and n - r"""
    x = np.arange(r, dtype=float)
    y = np.arange(1, r + 1, dtype=float)
    scale = r * (n - r)
    return _from_up_down((r - x) * (n - r - x) / scale, y * y / scale)


def hamming(n: int, r: int) -> BirthDeathChain:
    """Distance from the origin of the walk on the Hamming scheme H(r, n)"""
    x = np.arange(r, dtype=float)
    y = np.arange(1, r + 1, dtype=float)
    return _from_up_down((r - x) / r, y / (r * (n - 1)))


def theta_hypercube(theta: float, r: int) -> BirthDeathChain:
    x = np.arange(r, dtype=float)
    y = np.arange(1, r + 1, dtype=float)
    return _from_up_down((r - x) / r, y * theta / r)


def q_subspace(q: int, n: int, m: int) -> BirthDeathChain:
    """Distance chain of the walk on m-dimensional subspaces of F_q^n.

    Rates come from the Grassmann intersection numbers, normalized by the
    valency and written with negative powers of q only.
    """
    log_q = math.log(q)

    def one_minus(exponent):
        return -np.expm1(np.asarray(exponent, dtype=float) * log_q)

    x = np.arange(m, dtype=float)
    y = np.arange(1, m + 1, dtype=float)
    valency = one_minus(-m) * one_minus(m - n)
    up = one_minus(x - m) * one_minus(x + m - n) / valency
    down = np.exp((2 * y - n - 1) * log_q) * one_minus(-y) ** 2 / valency
    return _from_up_down(up, down)


def metropolis_log_weights(params: Dict[str, Any]) -> np.ndarray:
    """Unnormalized log target on {0..n}"""
    n = params["n"]
    j = np.arange(n + 1, dtype=float)
    target = params["target"]
    if target == "uniform":
        return np.zeros(n + 1)
    if target == "power":
        return params["d"] * np.log1p(j)
    if target == "binomial":
        return gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1) - n * math.log(2.0)
    weights = params["weights"]
    if not (np.isfinite(weights).all() and (weights > 0).all()):
        raise NonPositiveTarget("Metropolis target weights must be positive and finite")
    return np.log(weights)


def metropolis(target: Sequence[float]) -> BirthDeathChain:
    """Metropolis chain for a positive target on {0..n}.

    Proposal is the simple walk with holding 1/2 at the ends; a move is
    accepted with probability min(1, target ratio) and rejected mass is held.
    """
    weights = np.asarray(target, dtype=float).ravel()
    if weights.size < 2:
        raise InvalidParams("Metropolis target needs at least two states")
    if not (np.isfinite(weights).all() and (weights > 0).all()):
        raise NonPositiveTarget("Metropolis target weights must be positive and finite")
    return metropolis_from_log(np.log(weights))


def metropolis_from_log(log_weights: np.ndarray) -> BirthDeathChain:
    step = np.diff(log_weights)
    up = 0.5 * np.exp(np.minimum(step, 0.0))
    down = 0.5 * np.exp(np.minimum(-step, 0.0))
    return _from_up_down(up, down)


def _verify_spectrum(spec: FamilySpec, chain: BirthDeathChain):
    expected = closed_form_values(spec)
    computed = eigenvalues(chain).lambdas
    deviation = float(np.max(np.abs(computed - np.sort(expected))))
    if deviation > SPECTRUM_CHECK_TOLERANCE:
        raise ConvergenceFailure(
            f"{spec.label()}: spectrum deviates from the closed form by {deviation:.3g}"
        )
    logger.debug("%s: spectrum verified (max deviation %.3g)", spec.label(), deviation)


def build(spec: FamilySpec) -> BirthDeathChain:
    """Chain for a family spec"""
    params = family_params.validate(spec)
    kind = spec.kind

    if kind == "srw":
        return srw(params["n"])
    if kind == "biased_walk":
        return biased_walk(params["p"], params["n"])
    if kind == "bernoulli_laplace":
        return bernoulli_laplace(params["n"], params["r"])
    if kind == "hamming":
        return hamming(params["n"], params["r"])
    if kind == "theta_hypercube":
        return theta_hypercube(params["theta"], params["r"])
    if kind == "q_subspace":
        chain = q_subspace(params["q"], params["n"], params["m"])
        _verify_spectrum(spec, chain)
        return chain
    if kind == "metropolis":
        return metropolis_from_log(metropolis_log_weights(params))
    raise InvalidParams(f"unknown family kind '{spec.kind}'")


def closed_form_stationary(spec: FamilySpec) -> np.ndarray:
    """Published stationary law where one exists"""
    params = family_params.validate(spec)
    kind = spec.kind
    if kind == "bernoulli_laplace":
        n, r = params["n"], params["r"]
        j = np.arange(r + 1, dtype=float)
        log_nu = _log_binom(r, j) + _log_binom(n - r, j) - _log_binom(n, r)
        return np.exp(log_nu)
    if kind == "theta_hypercube":
        theta, r = params["theta"], params["r"]
        x = np.arange(r + 1, dtype=float)
        return np.exp(_log_binom(r, x) + (r - x) * math.log(theta) - r * math.log1p(theta))
    if kind == "hamming":
        n, r = params["n"], params["r"]
        x = np.arange(r + 1, dtype=float)
        return np.exp(_log_binom(r, x) + x * math.log(n - 1) - r * math.log(n))
    if kind == "srw" or (kind == "metropolis" and params["target"] == "uniform"):
        return np.full(params["n"] + 1, 1.0 / (params["n"] + 1))
    if kind == "biased_walk":
        x = np.arange(params["n"] + 1, dtype=float)
        log_w = x * math.log(params["p"] / params["q"])
    elif kind == "q_subspace":
        q, n, m = params["q"], params["n"], params["m"]
        x = np.arange(m + 1, dtype=float)
        log_w = x * x * math.log(q) + _log_gaussian_binom(m, m, q) + _log_gaussian_binom(n - m, m, q)
    elif kind == "metropolis":
        log_w = metropolis_log_weights(params)
    else:
        raise InvalidParams(f"{spec.label()} has no closed-form stationary law here")
    return np.exp(log_w - np.logaddexp.reduce(log_w))


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def _log_gaussian_binom(a: int, x_max: int, q: int) -> np.ndarray:
    """log of the q-binomial [a choose x]_q for x = 0..x_max, x_max <= a"""
    log_q = math.log(q)
    i = np.arange(x_max, dtype=float)
    ratio = ((a - 2 * i - 1) * log_q
             + np.log1p(-np.exp((i - a) * log_q))
             - np.log1p(-np.exp((-i - 1) * log_q)))
    return np.concatenate(([0.0], np.cumsum(ratio)))


def family_from_args(kind: str, **params: Any) -> FamilySpec:
    """FamilySpec from CLI-style keyword arguments, dropping unset ones"""
    return FamilySpec(kind=kind, params={k: v for k, v in params.items() if v is not None})
