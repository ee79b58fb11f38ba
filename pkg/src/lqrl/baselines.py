"""Classical reference controllers and the side-by-side comparison harness.

The linear state-feedback policy stands in for a "classical DRL" agent: it
is trained with the same finite-difference loop as the quantum policy but
without the Lyapunov penalty, and every report labels it as a substitute.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .dynamics import EnvConfig, VehicleState, clamp_action
from .errors import ConfigError, DivergenceError
from .lyapunov import LyapunovParams
from .metrics import MetricsReport, report
from .trainer import (
    InitialStateRange,
    Policy,
    RewardWeights,
    TrainConfig,
    TrainResult,
    run_episode,
    train,
)

STABILITY_DEFINITION = (
    "stable = mean dV/dt over the run <= 0 and max |z| <= {z_bound:g} m over the horizon"
)


@dataclass(frozen=True)
class PidParams:
    kp: float = 0.8
    ki: float = 0.05
    kd: float = 0.3
    integral_limit: float = 10.0

    def __post_init__(self):
        for name in ("kp", "ki", "kd"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"PID gain {name} must be finite", name)
        if not (math.isfinite(self.integral_limit) and self.integral_limit > 0):
            raise ConfigError(f"integral_limit must be > 0, got {self.integral_limit}", "integral_limit")


@dataclass(frozen=True)
class PidState:
    integral: float = 0.0
    z_prev: float | None = None


def pid_step(state: PidState, z: float, dt: float, params: PidParams, cfg: EnvConfig) -> tuple[float, PidState]:
    """One PID update on the spacing error; the derivative term is zero on the first call."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    if not math.isfinite(z):
        raise DivergenceError(f"non-finite spacing error {z}")
    lim = params.integral_limit
    integral = min(lim, max(-lim, state.integral + z * dt))
    dz = 0.0 if state.z_prev is None else (z - state.z_prev) / dt
    u = clamp_action(params.kp * z + params.ki * integral + params.kd * dz, cfg)
    return u, PidState(integral, z)


class PidController:
    """Stateful wrapper so a PID loop can be used wherever a policy is expected.

    One instance per run.
    """

    def __init__(self, params: PidParams, cfg: EnvConfig):
        self.params = params
        self.cfg = cfg
        self.state = PidState()

    def __call__(self, x: VehicleState) -> float:
        u, self.state = pid_step(self.state, x.z, self.cfg.dt, self.params, self.cfg)
        return u


@dataclass(frozen=True)
class LinearPolicyParams:
    k_z: float = 0.0
    k_vr: float = 0.0
    k_ve: float = 0.0
    bias: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_array()):
            raise ConfigError("linear policy gains must be finite", "k_z")

    def as_array(self) -> np.ndarray:
        return np.array([self.k_z, self.k_vr, self.k_ve, self.bias], dtype=float)

    @classmethod
    def from_array(cls, arr) -> LinearPolicyParams:
        return cls(*(float(v) for v in arr))


def linear_forward(params: LinearPolicyParams, x: VehicleState, cfg: EnvConfig, v_set: float) -> float:
    u = params.k_z * x.z + params.k_vr * x.v_r + params.k_ve * (v_set - x.v_e) + params.bias
    return clamp_action(u, cfg)


def linear_policy(params: LinearPolicyParams, cfg: EnvConfig, v_set: float) -> Policy:
    return lambda x: linear_forward(params, x, cfg, v_set)


def train_linear(
    params0: LinearPolicyParams,
    env: EnvConfig,
    weights: RewardWeights,
    train_cfg: TrainConfig,
    v_set: float,
    init_range: InitialStateRange | None = None,
    lyap: LyapunovParams | None = None,
) -> tuple[LinearPolicyParams, TrainResult]:
    """Train the linear policy with the shared finite-difference loop.

    ``lyap`` defaults to a zero-penalty configuration (lambda = 0).
    """
    init_range = InitialStateRange() if init_range is None else init_range
    lyap = LyapunovParams(lam=0.0) if lyap is None else lyap

    def episode_objective(th: np.ndarray, x0: VehicleState) -> float:
        policy = linear_policy(LinearPolicyParams.from_array(th), env, v_set)
        return run_episode(policy, x0, env, lyap, weights, train_cfg.horizon, record=False).objective

    result = train(params0.as_array(), episode_objective, train_cfg, init_range)
    return LinearPolicyParams.from_array(result.theta), result


def zero_policy(x: VehicleState) -> float:
    return 0.0


@dataclass(frozen=True)
class ComparisonRow:
    controller: str
    rmse_z: float
    mean_abs_u: float
    stable: bool
    diverged: bool = False
    metrics: MetricsReport | None = None

    @property
    def flag(self) -> str:
        if self.diverged:
            return "diverged"
        return "yes" if self.stable else "no"


def compare(
    controllers: Sequence[tuple[str, Callable[[], Policy]]],
    x0: VehicleState,
    env: EnvConfig,
    lyap: LyapunovParams,
    weights: RewardWeights,
    steps: int,
    z_bound: float,
) -> list[ComparisonRow]:
    """Run each controller on the same scenario and summarise it.

    ``controllers`` holds ``(name, factory)`` pairs; the factory is called once
    per run so stateful controllers start fresh. Rows keep the input order.
    """
    rows = []
    for name, factory in controllers:
        try:
            ep = run_episode(factory(), x0, env, lyap, weights, steps, record=True)
            m = report(ep.trajectory, lyap, env.dt)
        except (DivergenceError, ValueError):
            rows.append(ComparisonRow(name, math.nan, math.nan, False, diverged=True))
            continue
        max_abs_z = float(np.max(np.abs(ep.trajectory.column("z"))))
        stable = m.mean_vdot <= 0.0 and max_abs_z <= z_bound
        rows.append(ComparisonRow(name, m.rmse_z, m.mean_abs_u, stable, metrics=m))
    return rows
