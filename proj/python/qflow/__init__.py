"""Energy-stable integrators for phase-field gradient flows."""

from ._core import (
    Config,
    ConfigError,
    Error,
    IoError,
    NumericalError,
    RadicandError,
    Simulation,
    SolverError,
    example_config,
    load_config,
    parse_config_text,
    positive_split,
    read_energy_series,
    read_snapshot,
    run,
    simulate_to_disk,
)

__all__ = [
    "Config",
    "ConfigError",
    "Error",
    "IoError",
    "NumericalError",
    "RadicandError",
    "Simulation",
    "SolverError",
    "example_config",
    "load_config",
    "parse_config_text",
    "positive_split",
    "read_energy_series",
    "read_snapshot",
    "run",
    "simulate_to_disk",
]
