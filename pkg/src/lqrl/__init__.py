"""Lyapunov-penalised quantum-inspired policy learning for adaptive cruise control."""

from .dynamics import EnvConfig, LeadTracking, VehicleState, clamp_action, lead_accel, step, update_lead
from .errors import ConfigError, DivergenceError, LQRLError
from .lyapunov import LyapunovParams
from .metrics import MetricsReport
from .qpolicy import EncodingConfig, PolicyParams, QubitState
from .trainer import RewardWeights, TrainConfig
from .trajectory import TrajectoryLog

__all__ = [
    "ConfigError",
    "DivergenceError",
    "EncodingConfig",
    "EnvConfig",
    "LQRLError",
    "LeadTracking",
    "LyapunovParams",
    "MetricsReport",
    "PolicyParams",
    "QubitState",
    "RewardWeights",
    "TrainConfig",
    "TrajectoryLog",
    "VehicleState",
    "clamp_action",
    "lead_accel",
    "step",
    "update_lead",
]
