from .config import ConfigError, ExperimentConfig, load_config
from .experiments import run_experiment
from ..report import ExperimentReport, wilson_interval

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config",
    "run_experiment",
    "ExperimentReport",
    "wilson_interval",
]
