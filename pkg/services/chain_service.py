#!/usr/bin/env python3
"""
Chain Service - construct, validate and canonicalize birth-and-death chains
"""

import logging
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from models.data_models import BirthDeathChain, StationaryDistribution, SymmetricTridiagonal
from models.errors import InvalidParams, NotStochastic, OutOfRange, Reducible, StationaryOverflow

logger = logging.getLogger(__name__)

ROW_TOLERANCE = 1e-12
MONOTONE_TOLERANCE = 1e-12


def _as_vector(values: Sequence[float], name: str) -> np.ndarray:
    try:
        arr = np.asarray(values, dtype=float).ravel()
    except (TypeError, ValueError) as e:
        raise InvalidParams(f"{name}: rates must be numeric ({e})") from e
    return arr


def build_chain(p: Sequence[float], q: Sequence[float], r: Sequence[float],
                row_tolerance: float = ROW_TOLERANCE) -> BirthDeathChain:
    """Validate rate arrays and return the chain.

    Checks run in the order range, row sums, irreducibility. Rows within
    row_tolerance of 1 are renormalized.
    """
    p = _as_vector(p, "p")
    q = _as_vector(q, "q")
    r = _as_vector(r, "r")

    m = p.size
    if m < 1 or q.size != m or r.size != m + 1:
        raise InvalidParams(
            f"rate arrays must have lengths m, m, m+1 with m >= 1 (got {p.size}, {q.size}, {r.size})"
        )

    for name, arr in (("p", p), ("q", q), ("r", r)):
        bad = ~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0)
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise OutOfRange(f"{name}[{idx}] = {arr[idx]!r} is outside [0, 1]")

    sums = r.copy()
    sums[:-1] += p
    sums[1:] += q
    deviation = np.abs(sums - 1.0)
    if (deviation > row_tolerance).any():
        x = int(np.argmax(deviation))
        raise NotStochastic(f"row {x} sums to {sums[x]!r}")

    if (p <= 0.0).any():
        x = int(np.flatnonzero(p <= 0.0)[0])
        raise Reducible(f"p_{x} = 0")
    if (q <= 0.0).any():
        x = int(np.flatnonzero(q <= 0.0)[0]) + 1
        raise Reducible(f"q_{x} = 0")

    if (deviation > 0.0).any():
        logger.debug("renormalizing %d rows (max deviation %.3g)",
                     int((deviation > 0.0).sum()), float(deviation.max()))
        p = p / sums[:-1]
        q = q / sums[1:]
        r = r / sums

    return BirthDeathChain(m=m, p=p, q=q, r=r)


def chain_from_dict(data: Dict[str, Any], row_tolerance: float = ROW_TOLERANCE) -> BirthDeathChain:
    """Build from the chain file object {"m", "p", "q", "r"}"""
    try:
        chain = build_chain(data["p"], data["q"], data["r"], row_tolerance)
    except KeyError as e:
        raise InvalidParams(f"chain file is missing field {e}") from e
    if "m" in data and int(data["m"]) != chain.m:
        raise InvalidParams(f"declared m = {data['m']} but rates describe m = {chain.m}")
    return chain


def from_generator_rates(birth: Sequence[float], death: Sequence[float],
                         rate: Optional[float] = None) -> Tuple[BirthDeathChain, float]:
    """Uniformize a continuous-time birth-death generator Q into K = I + Q/rate.

    birth holds b_0..b_{m-1}, death holds d_1..d_m. The default rate is the
    largest total exit rate; the chain at time rate * t has the law of the
    generator at time t.
    """
    b = _as_vector(birth, "birth")
    d = _as_vector(death, "death")
    if b.size != d.size or b.size < 1:
        raise InvalidParams("birth and death rates must both have length m >= 1")
    if (b < 0).any() or (d < 0).any() or not (np.isfinite(b).all() and np.isfinite(d).all()):
        raise OutOfRange("generator rates must be finite and nonnegative")

    exit_rates = np.zeros(b.size + 1)
    exit_rates[:-1] += b
    exit_rates[1:] += d
    max_exit = float(exit_rates.max())
    if rate is None:
        rate = max_exit
    if rate <= 0 or rate < max_exit:
        raise InvalidParams(f"uniformization rate {rate} must be >= max exit rate {max_exit}")

    r = 1.0 - exit_rates / rate
    return build_chain(b / rate, d / rate, np.clip(r, 0.0, 1.0)), float(rate)


def stationary(chain: BirthDeathChain) -> StationaryDistribution:
    """nu(x) = c prod_{y <= x} p_{y-1} / q_y, computed in log space"""
    cached = chain._cache.get('stationary')
    if cached is not None:
        return cached

    log_w = np.zeros(chain.size)
    log_w[1:] = np.cumsum(np.log(chain.p) - np.log(chain.q))
    if not np.isfinite(log_w).all():
        raise StationaryOverflow("log-weights are not finite")

    log_nu = log_w - logsumexp(log_w)
    nu = np.exp(log_nu)
    if (nu <= 0.0).any():
        spread = float(log_w.max() - log_w.min())
        raise StationaryOverflow(
            f"stationary weights span {spread:.1f} nats, beyond double precision"
        )
    nu = nu / nu.sum()

    result = StationaryDistribution(nu=nu, log_nu=log_nu)
    chain._cache['stationary'] = result
    return result


def is_monotone(chain: BirthDeathChain, tolerance: float = MONOTONE_TOLERANCE) -> bool:
    """True iff p_x + q_{x+1} <= 1 for all 0 <= x < m"""
    return bool(np.all(chain.p + chain.q <= 1.0 + tolerance))


def symmetrize(chain: BirthDeathChain) -> SymmetricTridiagonal:
    """diag(sqrt(nu)) (I - K) diag(sqrt(nu))^-1, without forming nu"""
    return SymmetricTridiagonal(
        diagonal=1.0 - chain.r,
        offdiagonal=-np.sqrt(chain.p * chain.q),
    )


def transition_matrix(chain: BirthDeathChain, dense: bool = False):
    """K as a sparse CSR matrix (or dense array)"""
    K = sparse.diags([chain.q, chain.r, chain.p], [-1, 0, 1], format='csr')
    return K.toarray() if dense else K
