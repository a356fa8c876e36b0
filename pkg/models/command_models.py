#!/usr/bin/env python3
"""
Command model for the CLI
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from models.errors import InvalidParams
from models.report_models import FamilySpec

VERBS = ("spectrum", "sep-curve", "mix-time", "stats", "compare-distances", "scan", "profile")

# curves default to CSV, reports to JSON
DEFAULT_FORMATS = {
    "spectrum": "csv",
    "sep-curve": "csv",
    "compare-distances": "csv",
    "profile": "csv",
    "mix-time": "json",
    "stats": "json",
    "scan": "json",
}


@dataclass
class Command:
    """One CLI invocation: verb, exactly one input source, output and options"""
    verb: str
    chain_file: Optional[str] = None
    family: Optional[FamilySpec] = None
    family_points: List[FamilySpec] = field(default_factory=list)
    spectrum_file: Optional[str] = None
    output: Optional[str] = None
    fmt: Optional[str] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verb not in VERBS:
            raise InvalidParams(f"unknown verb '{self.verb}'")
        if self.fmt is None:
            self.fmt = DEFAULT_FORMATS[self.verb]
        if self.fmt not in ("csv", "json"):
            raise InvalidParams(f"unknown output format '{self.fmt}'")

    @property
    def source(self) -> str:
        """Which input source was given; exactly one is allowed"""
        given = [name for name, value in (
            ("chain", self.chain_file),
            ("family", self.family or self.family_points),
            ("spectrum", self.spectrum_file),
        ) if value]
        if len(given) != 1:
            raise InvalidParams(
                f"exactly one input source is required (--chain, --family/--family-file or --spectrum), got {len(given)}"
            )
        return given[0]
