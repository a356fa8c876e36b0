#!/usr/bin/env python3
"""
Service Container - Dependency Injection Pattern
Central configuration and shared services for the analyzer
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

from models.report_models import ScanThresholds
from services.file_processor_service import FileProcessorService
from services.report_writer import ReportWriter

console = Console(stderr=True)

DEFAULT_CONFIG = Path(__file__).resolve().parent.parent / "config" / "settings.yaml"


class ServiceContainer:
    """Central container for configuration and shared services"""

    def __init__(self, config_file: Optional[str] = None, verbose: bool = False):
        """Initialize service container with configuration"""
        load_dotenv()
        self.config_file = str(config_file or os.getenv("CUTOFF_CONFIG") or DEFAULT_CONFIG)
        self.verbose = verbose
        self.config = self._load_config()
        self._configure_logging()
        self._services: Dict[str, Any] = {}
        self._initialize_services()

        if self.verbose:
            console.print("🏗️ Service Container initialized", style="green")

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file"""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                config = yaml.safe_load(f) or {}
            if self.verbose:
                console.print(f"✅ Configuration loaded from {self.config_file}", style="green")
            return config
        except Exception as e:
            console.print(f"❌ Failed to load config: {e}", style="red")
            raise

    def _configure_logging(self):
        """Install a rich handler (and optional file handler) once per process"""
        section = self.config.get('logging', {})
        level_name = os.getenv("CUTOFF_LOG_LEVEL") or section.get('level', 'WARNING')
        if self.verbose and level_name.upper() == 'WARNING':
            level_name = 'INFO'
        level = getattr(logging, str(level_name).upper(), logging.WARNING)

        root = logging.getLogger()
        root.setLevel(level)
        if not any(getattr(h, '_cutoff_handler', False) for h in root.handlers):
            handler = RichHandler(console=console, show_path=False, markup=False)
            handler._cutoff_handler = True
            root.addHandler(handler)

            log_file = section.get('file')
            if log_file:
                Path(log_file).parent.mkdir(parents=True, exist_ok=True)
                file_handler = logging.FileHandler(log_file, encoding='utf-8')
                file_handler.setFormatter(logging.Formatter(section.get('format')))
                file_handler._cutoff_handler = True
                root.addHandler(file_handler)

    def _initialize_services(self):
        """Initialize shared I/O services"""
        self._services['files'] = FileProcessorService(
            verbose=self.verbose,
            row_tolerance=float(self.setting('chain', 'row_tolerance', 1e-12)),
        )
        self._services['reports'] = ReportWriter(
            significant_digits=int(self.setting('output', 'significant_digits', 12))
        )

    def setting(self, section: str, key: str, default: Any = None) -> Any:
        """Get one configured value"""
        return (self.config.get(section) or {}).get(key, default)

    @property
    def files(self) -> FileProcessorService:
        """Get file loader service"""
        return self._services['files']

    @property
    def reports(self) -> ReportWriter:
        """Get report writer service"""
        return self._services['reports']

    @property
    def thresholds(self) -> ScanThresholds:
        return ScanThresholds.from_config(self.config)

    @property
    def configuration(self) -> Dict[str, Any]:
        """Get configuration"""
        return self.config

    def get_service(self, service_name: str) -> Any:
        """Get service by name"""
        return self._services.get(service_name)

    def add_service(self, name: str, service: Any):
        """Add new service to container"""
        self._services[name] = service

    def list_services(self) -> Dict[str, str]:
        """List all available services"""
        return {name: type(service).__name__ for name, service in self._services.items()}
