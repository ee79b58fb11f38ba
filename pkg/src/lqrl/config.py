"""Experiment configuration: a flat JSON object, validated into typed components.

Every key is optional; missing keys take the defaults in :data:`DEFAULTS`.
See CONFIG.md for the meaning of each key.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .baselines import LinearPolicyParams, PidParams
from .dynamics import EnvConfig, VehicleState
from .errors import ConfigError
from .lyapunov import LyapunovParams
from .qpolicy import EncodingConfig
from .trainer import InitialStateRange, RewardWeights, TrainConfig

log = logging.getLogger(__name__)

CONTROLLERS = ("pid", "linear", "lqrl", "zero")

DEFAULTS: dict[str, Any] = {
    # simulation and learning parameters
    "dt": 0.05,
    "h": 1.2,
    "d0": 5.0,
    "u_min": -3.0,
    "u_max": 3.0,
    "beta": 0.6,
    "gamma": 0.05,
    "lambda": 2.0,
    "c": 0.05,
    "alpha": 0.02,
    "episodes": 60,
    "sim_duration": 30.0,
    # extensions
    "horizon": 400,
    "fd_epsilon": 0.01,
    "fd_scheme": "central",
    "grad_clip": 5.0,
    "seed": 0,
    "w_z": 1.0,
    "w_a": 0.1,
    "w_j": 0.1,
    "z_scale": 10.0,
    "v_scale": 10.0,
    "ve_scale": 30.0,
    "angle_gain": math.pi,
    "z0": 0.0,
    "v_r0": 0.0,
    "v_e0": 20.0,
    "init_z_range": [-2.0, 2.0],
    "init_v_r_range": [-1.0, 1.0],
    "init_v_e_range": [15.0, 25.0],
    "kp": 0.8,
    "ki": 0.05,
    "kd": 0.3,
    "integral_limit": 10.0,
    "k_z": 0.0,
    "k_vr": 0.0,
    "k_ve": 0.0,
    "bias": 0.0,
    "v_set": 20.0,
    "z_bound": 20.0,
    "controllers": ["pid", "linear", "lqrl"],
    "out_dir": "results",
}

_INT_KEYS = {"episodes", "horizon", "seed"}
_STR_KEYS = {"fd_scheme", "out_dir"}
_RANGE_KEYS = {"init_z_range", "init_v_r_range", "init_v_e_range"}
_NULLABLE_KEYS = {"grad_clip"}


@dataclass(frozen=True)
class ExperimentConfig:
    env: EnvConfig = field(default_factory=EnvConfig)
    lyap: LyapunovParams = field(default_factory=LyapunovParams)
    weights: RewardWeights = field(default_factory=RewardWeights)
    train: TrainConfig = field(default_factory=TrainConfig)
    enc: EncodingConfig = field(default_factory=EncodingConfig)
    pid: PidParams = field(default_factory=PidParams)
    linear: LinearPolicyParams = field(default_factory=LinearPolicyParams)
    init_range: InitialStateRange = field(default_factory=InitialStateRange)
    x0: VehicleState = field(default_factory=lambda: VehicleState(0.0, 0.0, 20.0))
    sim_duration: float = 30.0
    v_set: float = 20.0
    z_bound: float = 20.0
    controllers: tuple[str, ...] = ("pid", "linear", "lqrl")
    out_dir: str = "results"

    @property
    def sim_steps(self) -> int:
        return round(self.sim_duration / self.env.dt)

    @property
    def seed(self) -> int:
        return self.train.seed

    def to_dict(self) -> dict[str, Any]:
        return {
            "dt": self.env.dt,
            "h": self.env.h,
            "d0": self.env.d0,
            "u_min": self.env.u_min,
            "u_max": self.env.u_max,
            "beta": self.lyap.beta,
            "gamma": self.lyap.gamma,
            "lambda": self.lyap.lam,
            "c": self.lyap.c,
            "alpha": self.train.alpha,
            "episodes": self.train.episodes,
            "sim_duration": self.sim_duration,
            "horizon": self.train.horizon,
            "fd_epsilon": self.train.fd_epsilon,
            "fd_scheme": self.train.fd_scheme,
            "grad_clip": self.train.grad_clip,
            "seed": self.train.seed,
            "w_z": self.weights.w_z,
            "w_a": self.weights.w_a,
            "w_j": self.weights.w_j,
            "z_scale": self.enc.z_scale,
            "v_scale": self.enc.v_scale,
            "ve_scale": self.enc.ve_scale,
            "angle_gain": self.enc.angle_gain,
            "z0": self.x0.z,
            "v_r0": self.x0.v_r,
            "v_e0": self.x0.v_e,
            "init_z_range": list(self.init_range.z),
            "init_v_r_range": list(self.init_range.v_r),
            "init_v_e_range": list(self.init_range.v_e),
            "kp": self.pid.kp,
            "ki": self.pid.ki,
            "kd": self.pid.kd,
            "integral_limit": self.pid.integral_limit,
            "k_z": self.linear.k_z,
            "k_vr": self.linear.k_vr,
            "k_ve": self.linear.k_ve,
            "bias": self.linear.bias,
            "v_set": self.v_set,
            "z_bound": self.z_bound,
            "controllers": list(self.controllers),
            "out_dir": self.out_dir,
        }

    def with_seed(self, seed: int) -> ExperimentConfig:
        data = self.to_dict()
        data["seed"] = seed
        return from_dict(data)


def _check_type(key: str, val: Any) -> Any:
    if key in _NULLABLE_KEYS and val is None:
        return None
    if key in _STR_KEYS:
        if not isinstance(val, str):
            raise ConfigError(f"{key} must be a string, got {val!r}", key)
        return val
    if key in _RANGE_KEYS:
        if not (isinstance(val, list) and len(val) == 2):
            raise ConfigError(f"{key} must be a [lo, hi] pair, got {val!r}", key)
        return tuple(_check_type(key + "[]", v) for v in val)
    if key == "controllers":
        if not isinstance(val, list) or not val:
            raise ConfigError(f"controllers must be a non-empty list, got {val!r}", key)
        for name in val:
            if name not in CONTROLLERS:
                raise ConfigError(f"unknown controller {name!r}; expected one of {CONTROLLERS}", key)
        return tuple(val)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{key.rstrip('[]')} must be a number, got {val!r}", key.rstrip("[]"))
    if key in _INT_KEYS:
        if isinstance(val, float) and not val.is_integer():
            raise ConfigError(f"{key} must be an integer, got {val!r}", key)
        return int(val)
    return float(val)


def from_dict(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a raw mapping into an :class:`ExperimentConfig`.

    Unknown keys are rejected; missing keys take their defaults.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = sorted(set(data) - set(DEFAULTS))
    if unknown:
        raise ConfigError(f"unknown configuration key {unknown[0]!r}", unknown[0])
    missing = sorted(set(DEFAULTS) - set(data))
    if missing:
        log.info("config: using defaults for %d key(s): %s", len(missing), ", ".join(missing))
    merged = {**DEFAULTS, **data}
    v = {key: _check_type(key, merged[key]) for key in DEFAULTS}

    dt = v["dt"]
    env = EnvConfig(dt=dt, h=v["h"], d0=v["d0"], u_min=v["u_min"], u_max=v["u_max"], horizon=v["horizon"])
    ratio = v["sim_duration"] / dt
    if not (v["sim_duration"] > 0 and round(ratio) >= 1 and abs(ratio - round(ratio)) <= 1e-9 * max(1.0, ratio)):
        raise ConfigError(
            f"sim_duration must be a positive integer multiple of dt, got {v['sim_duration']} / {dt}", "sim_duration"
        )
    for key in ("v_set", "z_bound", "z0", "v_r0", "v_e0"):
        if not math.isfinite(v[key]):
            raise ConfigError(f"{key} must be finite", key)
    if not v["z_bound"] > 0:
        raise ConfigError(f"z_bound must be > 0, got {v['z_bound']}", "z_bound")
    return ExperimentConfig(
        env=env,
        lyap=LyapunovParams(beta=v["beta"], gamma=v["gamma"], c=v["c"], lam=v["lambda"]),
        weights=RewardWeights(w_z=v["w_z"], w_a=v["w_a"], w_j=v["w_j"]),
        train=TrainConfig(
            alpha=v["alpha"],
            episodes=v["episodes"],
            horizon=v["horizon"],
            fd_epsilon=v["fd_epsilon"],
            seed=v["seed"],
            fd_scheme=v["fd_scheme"],
            grad_clip=v["grad_clip"],
        ),
        enc=EncodingConfig(
            z_scale=v["z_scale"], v_scale=v["v_scale"], ve_scale=v["ve_scale"], angle_gain=v["angle_gain"]
        ),
        pid=PidParams(kp=v["kp"], ki=v["ki"], kd=v["kd"], integral_limit=v["integral_limit"]),
        linear=LinearPolicyParams(k_z=v["k_z"], k_vr=v["k_vr"], k_ve=v["k_ve"], bias=v["bias"]),
        init_range=InitialStateRange(z=v["init_z_range"], v_r=v["init_v_r_range"], v_e=v["init_v_e_range"]),
        x0=VehicleState(v["z0"], v["v_r0"], v["v_e0"]),
        sim_duration=v["sim_duration"],
        v_set=v["v_set"],
        z_bound=v["z_bound"],
        controllers=v["controllers"],
        out_dir=v["out_dir"],
    )


def loads(text: str) -> ExperimentConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_dict(data)


def load_config(path: str | Path) -> ExperimentConfig:
    return loads(Path(path).read_text(encoding="utf-8"))


def dumps(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), indent=2) + "\n"


def save_config(cfg: ExperimentConfig, path: str | Path) -> None:
    Path(path).write_text(dumps(cfg), encoding="utf-8")
