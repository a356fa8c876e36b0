#!/usr/bin/env python3
"""
Report models - cut-off statistics, scan verdicts, shape profiles, family specs
"""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional

import numpy as np


@dataclass(frozen=True)
class CutoffStats:
    """gap lambda, mean hitting time t, window sigma, N = lambda t, theta_2"""
    gap: float
    mean_hit: float
    window: float
    product: float
    theta2: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


class BoundPair(NamedTuple):
    """upper bounds sep after (1+c)t, lower bounds sep before (1-c)t"""
    upper: float
    lower: float


@dataclass(frozen=True)
class MixingBracket:
    """Interval guaranteed to contain tau(eps)"""
    low: float
    high: float

    def contains(self, value: float, rtol: float = 1e-9) -> bool:
        slack = rtol * max(1.0, abs(self.high))
        return self.low - slack <= value <= self.high + slack


@dataclass(frozen=True)
class ScanThresholds:
    """Heuristic thresholds for finite-scan verdicts"""
    divergence: float = 4.0
    bounded_ratio: float = 2.0
    gaussian_growth: float = 3.0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> 'ScanThresholds':
        section = (config or {}).get('cutoff', {}).get('thresholds', {})
        return cls(**{k: float(v) for k, v in section.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class FamilySpec:
    """Parametric family description, JSON form {"kind": ..., "params": {...}}"""
    kind: str
    params: Dict[str, Any] = field(default_factory=dict)

    # size parameter that grows along a scan
    SIZE_KEYS = {
        "srw": "n",
        "biased_walk": "n",
        "metropolis": "n",
        "bernoulli_laplace": "r",
        "hamming": "r",
        "theta_hypercube": "r",
        "q_subspace": "n",
    }

    ALIASES = {
        "srw_lazy_ends": "srw",
        "simple_walk": "srw",
        "biased": "biased_walk",
        "bl": "bernoulli_laplace",
        "theta": "theta_hypercube",
        "grassmann": "q_subspace",
    }

    def __post_init__(self):
        kind = self.kind.strip().lower().replace('-', '_')
        object.__setattr__(self, 'kind', self.ALIASES.get(kind, kind))
        object.__setattr__(self, 'params', dict(self.params))

    @property
    def size_parameter(self) -> Optional[float]:
        key = self.SIZE_KEYS.get(self.kind)
        if key is None or key not in self.params:
            return None
        return float(self.params[key])

    def label(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()) if k != "weights")
        return f"{self.kind}({inner})"

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'FamilySpec':
        return cls(kind=data["kind"], params=data.get("params", {}))


@dataclass(frozen=True)
class ScanPoint:
    """One family point of a scan"""
    param: float
    m: int
    stats: CutoffStats
    thetas: Dict[int, float] = field(default_factory=dict)
    monotone: bool = True
    label: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "param": self.param,
            "label": self.label,
            "m": self.m,
            "gap": self.stats.gap,
            "mean_hit": self.stats.mean_hit,
            "window": self.stats.window,
            "N": self.stats.product,
            "theta2": self.stats.theta2,
            "theta": {str(k): v for k, v in sorted(self.thetas.items())},
            "monotone": self.monotone,
        }


@dataclass(frozen=True)
class ScanVerdict:
    """Cut-off decision over a sequence of family points"""
    family_points: List[ScanPoint]
    trend: List[float]
    verdict: str            # cutoff | no-cutoff | inconclusive
    shape: str              # gaussian | non-gaussian | n/a
    thresholds: ScanThresholds
    mode: str = "continuous"
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "points": [point.to_dict() for point in self.family_points],
            "trend": list(self.trend),
            "verdict": self.verdict,
            "shape": self.shape,
            "thresholds": self.thresholds.to_dict(),
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class ShapeProfile:
    """sep along t + c sigma compared with the Gaussian and Gumbel tails"""
    grid: np.ndarray
    sep_values: np.ndarray
    reference_gaussian: np.ndarray
    reference_gumbel: np.ndarray
    sep_gumbel_values: np.ndarray
    sup_deviation_gaussian: float
    sup_deviation_gumbel: float
    gaussian_centering: Dict[str, float] = field(default_factory=dict)
    gumbel_centering: Dict[str, Any] = field(default_factory=dict)

    def to_rows(self) -> List[Dict[str, float]]:
        return [
            {
                "c": float(c),
                "sep": float(s),
                "gaussian_ref": float(g),
                "gumbel_ref": float(gu),
                "sep_gumbel": float(sg),
            }
            for c, s, g, gu, sg in zip(self.grid, self.sep_values, self.reference_gaussian,
                                       self.reference_gumbel, self.sep_gumbel_values)
        ]

    def summary(self) -> Dict[str, Any]:
        return {
            "sup_deviation_gaussian": self.sup_deviation_gaussian,
            "sup_deviation_gumbel": self.sup_deviation_gumbel,
            "gaussian_centering": dict(self.gaussian_centering),
            "gumbel_centering": dict(self.gumbel_centering),
        }


@dataclass(frozen=True)
class DistanceReport:
    """sep, TV and L2 distance of the time-t law from stationarity"""
    sep: float
    tv: float
    l2: float
    time: float
    method: str = "direct"   # spectral | direct
    mode: str = "continuous"

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass
class ServiceResult:
    """Generic result model for orchestrated commands"""
    success: bool
    data: Optional[Any] = None
    error_message: Optional[str] = None
    error_kind: Optional[str] = None    # domain | io
    metadata: Optional[Dict[str, Any]] = None
    processing_time: Optional[float] = None

    def __post_init__(self):
        if self.metadata is None:
            self.metadata = {}

    @classmethod
    def success_result(cls, data: Any, metadata: Dict[str, Any] = None) -> 'ServiceResult':
        """Create success result"""
        return cls(success=True, data=data, metadata=metadata or {})

    @classmethod
    def error_result(cls, error: str, kind: str = "domain",
                     metadata: Dict[str, Any] = None) -> 'ServiceResult':
        """Create error result"""
        return cls(success=False, error_message=error, error_kind=kind, metadata=metadata or {})

    @property
    def exit_code(self) -> int:
        if self.success:
            return 0
        return 2 if self.error_kind == "io" else 1
