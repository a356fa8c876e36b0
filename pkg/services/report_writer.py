#!/usr/bin/env python3
"""
Report Writer - deterministic CSV and JSON output
"""

import json
import math
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd


class ReportWriter:
    """Writes curves as CSV and reports as JSON with fixed significant digits"""

    def __init__(self, significant_digits: int = 12):
        self.significant_digits = significant_digits
        self.float_format = f"%.{significant_digits}g"

    def round_value(self, value: Any) -> Any:
        """Round floats (recursively) to the configured significant digits"""
        if isinstance(value, dict):
            return {str(k): self.round_value(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [self.round_value(v) for v in value]
        if isinstance(value, np.ndarray):
            return [self.round_value(v) for v in value.tolist()]
        if isinstance(value, (bool, np.bool_)):
            return bool(value)
        if isinstance(value, (int, np.integer)):
            return int(value)
        if isinstance(value, (float, np.floating)):
            value = float(value)
            if not math.isfinite(value):
                return None
            return float(self.float_format % value)
        return value

    def csv_text(self, rows: List[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
        frame = pd.DataFrame(rows, columns=columns)
        return frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    def json_text(self, payload: Any) -> str:
        return json.dumps(self.round_value(payload), indent=2) + "\n"

    def emit(self, text: str, output: Optional[str] = None):
        """Write text to a file, or stdout when output is None or '-'"""
        if output in (None, "-"):
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        path = Path(output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')

    def write_rows(self, rows: List[Dict[str, Any]], output: Optional[str] = None,
                   fmt: str = "csv", columns: Optional[List[str]] = None):
        if fmt == "json":
            self.emit(self.json_text(rows), output)
        else:
            self.emit(self.csv_text(rows, columns), output)

    def write_report(self, payload: Dict[str, Any], output: Optional[str] = None,
                     fmt: str = "json"):
        if fmt == "csv":
            flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
            self.emit(self.csv_text([flat]), output)
        else:
            self.emit(self.json_text(payload), output)
