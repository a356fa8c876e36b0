#!/usr/bin/env python3
"""
File Processor service - load chain files, family specs and spectrum CSVs
"""

import json
from pathlib import Path
from typing import Any, List

import pandas as pd
from rich.console import Console

from models.data_models import BirthDeathChain, Spectrum
from models.errors import InvalidParams
from models.report_models import FamilySpec
from services.chain_service import ROW_TOLERANCE, chain_from_dict
from services.spectral_service import spectrum_from_values

console = Console(stderr=True)


class InputFileError(OSError):
    """Input file missing, unreadable or malformed"""


class FileProcessorService:
    """Service for the analyzer's input file formats"""

    def __init__(self, verbose: bool = False, row_tolerance: float = ROW_TOLERANCE):
        self.supported_formats = [".json", ".csv"]
        self.verbose = verbose
        self.row_tolerance = row_tolerance

    def detect_file_format(self, file_path: str) -> str:
        """Detect file format from the suffix"""
        suffix = Path(file_path).suffix.lower()
        if suffix not in self.supported_formats:
            raise InputFileError(f"Unsupported file format: {suffix or '(none)'}")
        return suffix

    def _read_json(self, file_path: str) -> Any:
        path = Path(file_path)
        if not path.exists():
            raise InputFileError(f"File not found: {file_path}")
        if self.verbose:
            console.print(f"📂 Loading {file_path}", style="blue")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise InputFileError(f"Invalid JSON in {file_path}: {e}") from e

    def load_chain(self, file_path: str) -> BirthDeathChain:
        """Load a chain file {"m", "p", "q", "r"}"""
        self.detect_file_format(file_path)
        data = self._read_json(file_path)
        if not isinstance(data, dict):
            raise InvalidParams(f"{file_path}: chain file must hold a JSON object")
        return chain_from_dict(data, self.row_tolerance)

    def load_family_specs(self, file_path: str) -> List[FamilySpec]:
        """Load one spec, a list of specs, or {"points": [...]}"""
        self.detect_file_format(file_path)
        data = self._read_json(file_path)
        if isinstance(data, dict) and 'points' in data:
            data = data['points']
        items = data if isinstance(data, list) else [data]
        specs = []
        for i, item in enumerate(items):
            if not isinstance(item, dict) or 'kind' not in item:
                raise InvalidParams(f"{file_path}: entry {i} is not a family spec")
            specs.append(FamilySpec.from_dict(item))
        return specs

    def load_spectrum(self, file_path: str) -> Spectrum:
        """Load eigenvalues from a CSV with a 'lambda' column"""
        if self.detect_file_format(file_path) != '.csv':
            raise InputFileError(f"Spectrum files must be CSV: {file_path}")
        if not Path(file_path).exists():
            raise InputFileError(f"File not found: {file_path}")
        try:
            frame = pd.read_csv(file_path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise InputFileError(f"Cannot parse {file_path}: {e}") from e
        if 'lambda' not in frame.columns:
            raise InvalidParams(f"{file_path}: spectrum CSV needs a 'lambda' column")
        return spectrum_from_values(frame['lambda'].to_numpy(dtype=float))
