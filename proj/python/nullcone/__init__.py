"""Desk-scale verification suites for double-null Kerr/Schwarzschild machinery.

The heavy lifting lives in the C++ core; this package re-exports the bound
operations and report runners.
"""

from ._nullcone import (
    ConfigError,
    DomainError,
    KerrParams,
    Report,
    background_rho,
    background_ricci,
    background_suite,
    bianchi_run,
    bl_metric,
    case_table,
    decay_check,
    frames_check,
    hodge_poincare,
    hodge_verify,
    horizon_radius,
    peeling_table,
    report_dict,
    report_json,
    tortoise_coords,
    transport_check,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "KerrParams",
    "Report",
    "background_rho",
    "background_ricci",
    "background_suite",
    "bianchi_run",
    "bl_metric",
    "case_table",
    "decay_check",
    "frames_check",
    "hodge_poincare",
    "hodge_verify",
    "horizon_radius",
    "peeling_table",
    "report_dict",
    "report_json",
    "tortoise_coords",
    "transport_check",
]

__version__ = "0.1.0"
