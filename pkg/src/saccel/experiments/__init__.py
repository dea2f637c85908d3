"""Config-driven experiments binding the simulators to statistical verdicts."""

from .config import (
    ConfigError,
    ExperimentConfig,
    ExperimentDef,
    build_config,
    load_config_file,
)
from .runner import run_config, run_named
from .runners import REGISTRY, get_runner
