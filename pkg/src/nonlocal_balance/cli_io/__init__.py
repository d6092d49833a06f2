"""Scenario configuration, command-line driver and serialization."""

from .cli import compare_command, main, oracle_command, parse_perturbation, run_command
from .config import ScenarioConfig, load_config, parse_config, shipped_config
from .io import (
    format_grid_dump,
    parse_grid_dump,
    pgm_bytes,
    read_grid_dump,
    read_pgm,
    read_timeseries,
    timeseries_csv,
    write_grid_dump,
    write_pgm,
    write_timeseries,
)

__all__ = [
    "ScenarioConfig",
    "compare_command",
    "format_grid_dump",
    "load_config",
    "main",
    "oracle_command",
    "parse_config",
    "parse_grid_dump",
    "parse_perturbation",
    "pgm_bytes",
    "read_grid_dump",
    "read_pgm",
    "read_timeseries",
    "run_command",
    "shipped_config",
    "timeseries_csv",
    "write_grid_dump",
    "write_pgm",
    "write_timeseries",
]
