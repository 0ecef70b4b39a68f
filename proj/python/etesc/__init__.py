"""Event-triggered extremum seeking simulator."""

from ._etesc import (
    AnalysisError,
    CertificateError,
    ConfigError,
    DivergenceError,
    Scenario,
    certify,
    dwell_time_dynamic,
    dwell_time_static,
    interval_stats,
    load_scenario,
    parse_scenario,
    run,
    simulate,
    solve_lyapunov,
    sweep,
    validate,
)

__all__ = [
    "AnalysisError",
    "CertificateError",
    "ConfigError",
    "DivergenceError",
    "Scenario",
    "certify",
    "dwell_time_dynamic",
    "dwell_time_static",
    "interval_stats",
    "load_scenario",
    "parse_scenario",
    "run",
    "simulate",
    "solve_lyapunov",
    "sweep",
    "validate",
]
