"""Deterministic multi-device task-offloading simulator with an
attention-critic reinforcement learner and experiment harness."""

from .config import (ExperimentConfig, ObsParams, RewardParams, SweepSpec,
                     SystemConfig, TrainConfig, desk_config, parse_config)
from .errors import (CheckpointError, ConfigError, EdgeOffloadError,
                     NumericalError, ProtocolError, ShapeError)

__version__ = "0.1.0"

__all__ = [
    "ExperimentConfig", "ObsParams", "RewardParams", "SweepSpec",
    "SystemConfig", "TrainConfig", "desk_config", "parse_config",
    "CheckpointError", "ConfigError", "EdgeOffloadError", "NumericalError",
    "ProtocolError", "ShapeError", "__version__",
]
