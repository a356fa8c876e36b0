#!/usr/bin/env python3
"""
Data models for birth-and-death chains and their spectra

States are indexed 0..m. Arrays p and q both have length m: p[x] is the
up-rate p_x for x = 0..m-1 and q[x-1] is the down-rate q_x for x = 1..m.
"""

import threading
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np


def _frozen_array(values: Any) -> np.ndarray:
    """Copy values into a read-only float array"""
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BirthDeathChain:
    """Validated rate triples (p, q, r) on {0, ..., m}"""
    m: int
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    # spectrum and stationary law, filled on first use
    _cache: Dict[str, Any] = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'p', _frozen_array(self.p))
        object.__setattr__(self, 'q', _frozen_array(self.q))
        object.__setattr__(self, 'r', _frozen_array(self.r))

    @property
    def size(self) -> int:
        """Number of states m + 1"""
        return self.m + 1

    def to_dict(self) -> Dict[str, Any]:
        """Chain file representation"""
        return {
            "m": int(self.m),
            "p": self.p.tolist(),
            "q": self.q.tolist(),
            "r": self.r.tolist(),
        }


@dataclass(frozen=True)
class StationaryDistribution:
    """Stationary law nu with the log-weights it was normalized from"""
    nu: np.ndarray
    log_nu: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'nu', _frozen_array(self.nu))
        object.__setattr__(self, 'log_nu', _frozen_array(self.log_nu))


@dataclass(frozen=True)
class SymmetricTridiagonal:
    """Symmetric tridiagonal matrix similar to I - K"""
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'diagonal', _frozen_array(self.diagonal))
        object.__setattr__(self, 'offdiagonal', _frozen_array(self.offdiagonal))

    def to_dense(self) -> np.ndarray:
        return (np.diag(self.diagonal)
                + np.diag(self.offdiagonal, 1)
                + np.diag(self.offdiagonal, -1))


@dataclass(frozen=True, eq=False)
class Spectrum:
    """The m nonzero eigenvalues of I - K, ascending.

    Ties appear only where distinct eigenvalues are closer than double
    precision resolves. lambda_0 = 0 is never stored; includes_zero stays
    False as a marker of that convention.
    """
    lambdas: np.ndarray
    includes_zero: bool = False
    _cache: Dict[str, Any] = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, 'lambdas', _frozen_array(self.lambdas))

    @property
    def m(self) -> int:
        return int(self.lambdas.size)

    @property
    def gap(self) -> float:
        return float(self.lambdas[0])

    @property
    def largest(self) -> float:
        return float(self.lambdas[-1])

    def to_rows(self) -> List[Dict[str, Any]]:
        """Rows (index, lambda) with 1-based index"""
        return [{"index": i + 1, "lambda": float(v)} for i, v in enumerate(self.lambdas)]


@dataclass
class HittingTimeLaw:
    """Law of the strong stationary time T = S_1 + ... + S_m.

    In continuous mode S_i is exponential(lambda_i). In discrete mode the law
    is the one with generating function prod lambda_i s / (1 - (1 - lambda_i) s),
    which is a geometric phase whenever lambda_i <= 1.
    """
    spectrum: Spectrum
    mode: str = "continuous"
    # continuous: survival s_k of the uniformized phase chain after k jumps
    # discrete: P(T > k); both extended lazily together with the recursion state
    tail: np.ndarray = field(default_factory=lambda: np.ones(1), repr=False)
    state: Dict[str, Any] = field(default_factory=dict, repr=False)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("continuous", "discrete"):
            raise ValueError(f"Unknown mode: {self.mode}")


@dataclass(frozen=True)
class Moments:
    """Mean and variance of T"""
    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(max(self.variance, 0.0)))

    def to_dict(self) -> Dict[str, float]:
        return {"mean": self.mean, "variance": self.variance}


@dataclass(frozen=True)
class DistributionAtTime:
    """Law of the chain at a time t (continuous) or after k steps (discrete)"""
    probs: np.ndarray
    time: float
    mode: str = "continuous"
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'probs', _frozen_array(self.probs))
