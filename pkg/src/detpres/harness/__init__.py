"""Suites, brute-force classification and the command-line interface."""

from .classify import classify_linear_preservers
from .suites import SuiteReport, run_suite, suite_names

__all__ = ["SuiteReport", "classify_linear_preservers", "run_suite", "suite_names"]
