"""
Bench module for revocable ABE.
Contains the timing harness and the parameter-sweep suites.
"""

from .harness import COLUMNS, Measurement, affine_fit, fit_by_impl, summarize, time_call, to_frame
from .suites import SUITES, SweepConfig, run_suite

__all__ = [
    "COLUMNS",
    "Measurement",
    "affine_fit",
    "fit_by_impl",
    "summarize",
    "time_call",
    "to_frame",
    "SUITES",
    "SweepConfig",
    "run_suite",
]
