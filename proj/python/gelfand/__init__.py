"""Gelfand problems with radial drift on the unit ball."""

from ._core import (
    BracketError,
    ConfigError,
    DomainError,
    Error,
    FlowProfile,
    Nonlinearity,
    OverflowError,
    bounds_report,
    branch_scan,
    config_hash,
    lambda_star,
    run_golden_suite,
    sweep_A,
    sweep_p,
    torsion,
    torsion_max,
)

__all__ = [
    "BracketError",
    "ConfigError",
    "DomainError",
    "Error",
    "FlowProfile",
    "Nonlinearity",
    "OverflowError",
    "bounds_report",
    "branch_scan",
    "config_hash",
    "lambda_star",
    "run_golden_suite",
    "sweep_A",
    "sweep_p",
    "torsion",
    "torsion_max",
]
