"""Certified numerics for theta linear systems on degenerating abelian varieties."""

from ampletheta._accel import backend
from ampletheta.config import SuiteConfig, load_config
from ampletheta.harness import run_suite
from ampletheta.report import DiagnosticsReport, emit_report

__version__ = "0.1.0"

__all__ = ["DiagnosticsReport", "SuiteConfig", "backend", "emit_report", "load_config",
           "run_suite", "__version__"]
