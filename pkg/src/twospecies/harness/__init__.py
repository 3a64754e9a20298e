"""Experiment orchestration: configs, sweeps and result files."""
from .config import ExperimentConfig, config_from_dict, load_config
from .output import read_records, write_results
from .sweeps import (
    KineticCache,
    ResultRecord,
    aggregate_pdmp,
    loglog_slope,
    run_pdmp_sweep,
    run_scheme_sweep,
)

__all__ = [
    "ExperimentConfig",
    "config_from_dict",
    "load_config",
    "read_records",
    "write_results",
    "KineticCache",
    "ResultRecord",
    "aggregate_pdmp",
    "loglog_slope",
    "run_pdmp_sweep",
    "run_scheme_sweep",
]
