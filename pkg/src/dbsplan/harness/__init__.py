"""Reproducible experiment sweeps over the placement and backhaul pipeline."""
from .config import ConfigError, ExperimentConfig, config_from_mapping, load_config
from .experiment import METRIC_COLUMNS, run_experiment, run_seed, run_task, scenario_seed
from .summary import format_table, read_metrics, summarize, write_summary

__all__ = [
    "ConfigError", "ExperimentConfig", "METRIC_COLUMNS", "config_from_mapping", "format_table",
    "load_config", "read_metrics", "run_experiment", "run_seed", "run_task", "scenario_seed",
    "summarize", "write_summary",
]
