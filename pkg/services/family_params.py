#!/usr/bin/env python3
"""
Family parameter validation shared by the family builders and the closed-form spectra
"""

import math
from typing import Any, Dict

import numpy as np

from models.errors import InvalidParams
from models.report_models import FamilySpec

KINDS = (
    "srw",
    "biased_walk",
    "metropolis",
    "bernoulli_laplace",
    "hamming",
    "theta_hypercube",
    "q_subspace",
)

METROPOLIS_TARGETS = ("uniform", "power", "binomial", "explicit")


def _int_param(params: Dict[str, Any], key: str, kind: str) -> int:
    if key not in params:
        raise InvalidParams(f"{kind}: missing parameter '{key}'")
    value = params[key]
    try:
        as_float = float(value)
    except (TypeError, ValueError) as e:
        raise InvalidParams(f"{kind}: '{key}' must be an integer (got {value!r})") from e
    if not as_float.is_integer():
        raise InvalidParams(f"{kind}: '{key}' must be an integer (got {value!r})")
    return int(as_float)


def _float_param(params: Dict[str, Any], key: str, kind: str) -> float:
    if key not in params:
        raise InvalidParams(f"{kind}: missing parameter '{key}'")
    try:
        value = float(params[key])
    except (TypeError, ValueError) as e:
        raise InvalidParams(f"{kind}: '{key}' must be a number (got {params[key]!r})") from e
    if not math.isfinite(value):
        raise InvalidParams(f"{kind}: '{key}' must be finite")
    return value


def is_prime_power(q: int) -> bool:
    """Trial factorization: q = prime ** k with k >= 1"""
    if q < 2:
        return False
    for f in range(2, math.isqrt(q) + 1):
        if q % f == 0:
            while q % f == 0:
                q //= f
            return q == 1
    return True


def validate(spec: FamilySpec) -> Dict[str, Any]:
    """Return typed parameters for spec, raising InvalidParams on violations"""
    kind = spec.kind
    params = spec.params

    if kind == "srw":
        n = _int_param(params, "n", kind)
        if n < 1:
            raise InvalidParams("srw: n must be >= 1")
        return {"n": n}

    if kind == "biased_walk":
        n = _int_param(params, "n", kind)
        p = _float_param(params, "p", kind)
        q = 1.0 - p
        if "q" in params and abs(_float_param(params, "q", kind) - q) > 1e-12:
            raise InvalidParams("biased_walk: p + q must equal 1")
        if not (0.0 < q < p < 1.0):
            raise InvalidParams(f"biased_walk: need 0 < q < p < 1 (got p = {p})")
        if n < 1:
            raise InvalidParams("biased_walk: n must be >= 1")
        return {"n": n, "p": p, "q": q}

    if kind == "bernoulli_laplace":
        n = _int_param(params, "n", kind)
        r = _int_param(params, "r", kind)
        if not (0 < 2 * r <= n):
            raise InvalidParams(f"bernoulli_laplace: need 0 < 2r <= n (got n = {n}, r = {r})")
        return {"n": n, "r": r}

    if kind == "hamming":
        n = _int_param(params, "n", kind)
        r = _int_param(params, "r", kind)
        if n < 2 or r < 1:
            raise InvalidParams(f"hamming: need n >= 2 and r >= 1 (got n = {n}, r = {r})")
        return {"n": n, "r": r}

    if kind == "theta_hypercube":
        theta = _float_param(params, "theta", kind)
        r = _int_param(params, "r", kind)
        if not (0.0 < theta <= 1.0):
            raise InvalidParams(f"theta_hypercube: theta must lie in (0, 1] (got {theta})")
        if r < 1:
            raise InvalidParams("theta_hypercube: r must be >= 1")
        return {"theta": theta, "r": r}

    if kind == "q_subspace":
        q = _int_param(params, "q", kind)
        n = _int_param(params, "n", kind)
        m = _int_param(params, "m", kind)
        if not is_prime_power(q):
            raise InvalidParams(f"q_subspace: q = {q} is not a prime power")
        if not (1 <= m and 2 * m <= n):
            raise InvalidParams(f"q_subspace: need 1 <= m and 2m <= n (got n = {n}, m = {m})")
        return {"q": q, "n": n, "m": m}

    if kind == "metropolis":
        n = _int_param(params, "n", kind)
        if n < 1:
            raise InvalidParams("metropolis: n must be >= 1")
        target = str(params.get("target", "uniform")).lower()
        if target not in METROPOLIS_TARGETS:
            raise InvalidParams(f"metropolis: unknown target '{target}' (use {', '.join(METROPOLIS_TARGETS)})")
        typed: Dict[str, Any] = {"n": n, "target": target}
        if target == "power":
            typed["d"] = _float_param(params, "d", kind)
        elif target == "explicit":
            weights = params.get("weights")
            if weights is None:
                raise InvalidParams("metropolis: explicit target needs 'weights'")
            weights = np.asarray(weights, dtype=float).ravel()
            if weights.size != n + 1:
                raise InvalidParams(f"metropolis: expected {n + 1} weights, got {weights.size}")
            typed["weights"] = weights
        return typed

    raise InvalidParams(f"unknown family kind '{spec.kind}' (use {', '.join(KINDS)})")
