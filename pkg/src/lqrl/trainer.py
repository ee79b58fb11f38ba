"""Closed-loop rollouts, the stability-penalised objective and finite-difference training."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import lyapunov
from .dynamics import (
    EnvConfig,
    VehicleState,
    clamp_action,
    initial_lead,
    lead_accel,
    step,
    update_lead,
)
from .errors import ConfigError, DivergenceError
from .lyapunov import LyapunovParams
from .qpolicy import EncodingConfig, PolicyParams, forward, init_params
from .trajectory import TrajectoryLog

log = logging.getLogger(__name__)

Policy = Callable[[VehicleState], float]
FD_SCHEMES = ("central", "forward", "spsa")
DIVERGENCE_LIMIT = 1e6


@dataclass(frozen=True)
class RewardWeights:
    w_z: float = 1.0
    w_a: float = 0.1
    w_j: float = 0.1

    def __post_init__(self):
        for name in ("w_z", "w_a", "w_j"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val >= 0):
                raise ConfigError(f"{name} must be finite and >= 0, got {val}", name)


@dataclass(frozen=True)
class InitialStateRange:
    """Uniform ranges for the per-episode initial state."""

    z: tuple[float, float] = (-2.0, 2.0)
    v_r: tuple[float, float] = (-1.0, 1.0)
    v_e: tuple[float, float] = (15.0, 25.0)

    def __post_init__(self):
        for name in ("z", "v_r", "v_e"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ConfigError(
                    f"initial {name} range must satisfy lo <= hi, got ({lo}, {hi})", f"init_{name}_range"
                )

    def sample(self, rng: np.random.Generator) -> VehicleState:
        return VehicleState(
            float(rng.uniform(*self.z)),
            float(rng.uniform(*self.v_r)),
            float(rng.uniform(*self.v_e)),
        )


@dataclass(frozen=True)
class TrainConfig:
    alpha: float = 0.02
    episodes: int = 60
    horizon: int = 400
    fd_epsilon: float = 0.01
    seed: int = 0
    fd_scheme: str = "central"
    # max L2 norm of the gradient estimate before the update; None disables
    grad_clip: float | None = 5.0

    def __post_init__(self):
        # alpha == 0 is allowed: it evaluates the objective without learning
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ConfigError(f"alpha must be >= 0, got {self.alpha}", "alpha")
        if int(self.episodes) != self.episodes or self.episodes < 1:
            raise ConfigError(f"episodes must be an integer >= 1, got {self.episodes}", "episodes")
        if int(self.horizon) != self.horizon or self.horizon < 2:
            raise ConfigError(f"horizon must be an integer >= 2, got {self.horizon}", "horizon")
        if not (math.isfinite(self.fd_epsilon) and self.fd_epsilon > 0):
            raise ConfigError(f"fd_epsilon must be > 0, got {self.fd_epsilon}", "fd_epsilon")
        if self.fd_scheme not in FD_SCHEMES:
            raise ConfigError(f"fd_scheme must be one of {FD_SCHEMES}, got {self.fd_scheme!r}", "fd_scheme")
        if self.grad_clip is not None and not (math.isfinite(self.grad_clip) and self.grad_clip > 0):
            raise ConfigError(f"grad_clip must be > 0 or null, got {self.grad_clip}", "grad_clip")


@dataclass
class EpisodeResult:
    total_reward: float
    total_penalty: float
    objective: float
    trajectory: TrajectoryLog | None = None
    gap_violated: bool = False


def reward(z: float, u: float, u_prev: float, w: RewardWeights) -> float:
    du = u - u_prev
    return -w.w_z * z * z - w.w_a * u * u - w.w_j * du * du


def run_episode(
    policy: Policy,
    x0: VehicleState,
    env: EnvConfig,
    lyap: LyapunovParams,
    weights: RewardWeights,
    steps: int | None = None,
    record: bool = True,
) -> EpisodeResult:
    """Simulate ``steps`` Euler steps under ``policy`` with the scripted lead.

    Reward and penalty at step k use the pre-step state x_k and the clamped
    action u_k; the jerk term uses ``u_{-1} = 0``.
    """
    steps = env.horizon if steps is None else steps
    dt = env.dt
    traj = TrajectoryLog() if record else None
    x = x0
    lead = initial_lead(x0, env)
    u_prev = 0.0
    total_r = 0.0
    total_pen = 0.0
    gap_violated = False
    for k in range(steps):
        a_l = lead_accel(k * dt)
        try:
            u = clamp_action(policy(x), env)
            x_next = step(x, u, a_l, env)
        except DivergenceError as exc:
            err = DivergenceError(f"step {k}: {exc}", step=k)
            err.trajectory = traj
            raise err from exc
        if not x_next.is_finite():
            err = DivergenceError(f"step {k}: state became non-finite {x_next}", step=k)
            err.trajectory = traj
            raise err
        r = reward(x.z, u, u_prev, weights)
        pen = lyapunov.penalty(x, u, a_l, lyap, env)
        v_next = lyapunov.value(x_next, lyap)
        vdot = lyapunov.derivative(x, u, a_l, lyap, env)
        if not all(math.isfinite(q) for q in (r, pen, v_next, vdot)):
            # squares overflow before the state itself does
            err = DivergenceError(f"step {k}: reward or Lyapunov terms overflowed at {x}", step=k)
            err.trajectory = traj
            raise err
        total_r += r
        total_pen += pen
        if traj is not None:
            traj.append((k + 1) * dt, x_next.z, x_next.v_r, x_next.v_e, u, a_l, v_next, vdot)
        lead = update_lead(lead, a_l, x, x_next, env)
        if lead.d < 0 and not gap_violated:
            gap_violated = True
            if record:
                log.warning("inter-vehicle distance negative (d=%.3f m) at t=%.2f s", lead.d, (k + 1) * dt)
        u_prev = u
        x = x_next
    return EpisodeResult(total_r, total_pen, total_r - total_pen, traj, gap_violated)


def qpolicy(theta: PolicyParams, enc: EncodingConfig, env: EnvConfig) -> Policy:
    return lambda x: forward(theta, x, enc, env)


def rollout(
    theta: PolicyParams,
    env: EnvConfig,
    lyap: LyapunovParams,
    weights: RewardWeights,
    enc: EncodingConfig,
    seed: int,
    init_range: InitialStateRange | None = None,
    steps: int | None = None,
    record: bool = True,
) -> EpisodeResult:
    """One episode of the quantum policy from an initial state drawn with ``seed``."""
    init_range = InitialStateRange() if init_range is None else init_range
    x0 = init_range.sample(np.random.default_rng(seed))
    return run_episode(qpolicy(theta, enc, env), x0, env, lyap, weights, steps, record)


def fd_gradient(
    theta: Sequence[float],
    objective_fn: Callable[[np.ndarray], float],
    fd_epsilon: float,
    scheme: str = "central",
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Finite-difference estimate of the gradient of ``objective_fn`` at ``theta``.

    ``objective_fn`` must be deterministic (common random numbers). The
    returned vector is assembled in coordinate order, so the result does not
    depend on how the evaluations are scheduled.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.size

    def evaluate(point, coord=None):
        val = float(objective_fn(point))
        if not math.isfinite(val):
            where = f"coordinate {coord}" if coord is not None else "perturbation"
            raise DivergenceError(f"non-finite objective while perturbing {where}", coordinate=coord)
        return val

    if scheme == "spsa":
        if rng is None:
            raise ValueError("spsa requires an rng")
        delta = rng.choice([-1.0, 1.0], size=n)
        j_plus = evaluate(theta + fd_epsilon * delta)
        j_minus = evaluate(theta - fd_epsilon * delta)
        return (j_plus - j_minus) / (2 * fd_epsilon) / delta

    grad = np.zeros(n)
    if scheme == "forward":
        j0 = evaluate(theta)
        for i in range(n):
            e = np.zeros(n)
            e[i] = fd_epsilon
            grad[i] = (evaluate(theta + e, i) - j0) / fd_epsilon
        return grad
    if scheme != "central":
        raise ValueError(f"unknown finite-difference scheme {scheme!r}")
    for i in range(n):
        e = np.zeros(n)
        e[i] = fd_epsilon
        grad[i] = (evaluate(theta + e, i) - evaluate(theta - e, i)) / (2 * fd_epsilon)
    return grad


def update(theta: Sequence[float], gradient: Sequence[float], alpha: float) -> np.ndarray:
    """Gradient ascent on the objective (descent on the stabilised loss)."""
    gradient = np.asarray(gradient, dtype=float)
    if not np.all(np.isfinite(gradient)):
        raise DivergenceError(f"non-finite gradient {gradient}")
    return np.asarray(theta, dtype=float) + alpha * gradient


def clip_gradient(gradient: np.ndarray, max_norm: float | None) -> np.ndarray:
    """Rescale ``gradient`` onto the ball of radius ``max_norm`` if it lies outside."""
    if max_norm is None:
        return gradient
    norm = float(np.linalg.norm(gradient))
    if norm > max_norm:
        return gradient * (max_norm / norm)
    return gradient


@dataclass
class TrainResult:
    theta: np.ndarray
    history: list[float] = field(default_factory=list)
    theta_history: list[np.ndarray] = field(default_factory=list)


def train(
    theta0: Sequence[float],
    episode_objective: Callable[[np.ndarray, VehicleState], float],
    train_cfg: TrainConfig,
    init_range: InitialStateRange,
    rng: np.random.Generator | None = None,
    progress: Callable[[int, float], None] | None = None,
) -> TrainResult:
    """Generic finite-difference training loop.

    Each episode draws one initial state, evaluates the objective at the
    current parameters (recorded in ``history``), estimates the gradient on
    that same initial state and takes one ascent step. The raw objective is
    a sum over hundreds of steps, so its gradient can be many orders of
    magnitude larger than ``1/alpha``; ``train_cfg.grad_clip`` bounds the
    step length.
    """
    rng = np.random.default_rng(train_cfg.seed) if rng is None else rng
    theta = np.asarray(theta0, dtype=float).copy()
    result = TrainResult(theta=theta, theta_history=[theta.copy()])
    for ep in range(train_cfg.episodes):
        x0 = init_range.sample(rng)

        def objective(th, x0=x0):
            return episode_objective(th, x0)

        j = objective(theta)
        if not math.isfinite(j):
            raise DivergenceError(f"episode {ep}: non-finite objective", step=ep)
        grad = fd_gradient(theta, objective, train_cfg.fd_epsilon, train_cfg.fd_scheme, rng)
        theta = update(theta, clip_gradient(grad, train_cfg.grad_clip), train_cfg.alpha)
        if np.any(np.abs(theta) > DIVERGENCE_LIMIT):
            raise DivergenceError(f"episode {ep}: parameters diverged {theta}", step=ep)
        result.history.append(j)
        result.theta_history.append(theta.copy())
        if progress is not None:
            progress(ep, j)
    result.theta = theta
    return result


def train_qpolicy(
    env: EnvConfig,
    lyap: LyapunovParams,
    weights: RewardWeights,
    enc: EncodingConfig,
    train_cfg: TrainConfig,
    init_range: InitialStateRange | None = None,
    theta0: PolicyParams | None = None,
    progress: Callable[[int, float], None] | None = None,
) -> tuple[PolicyParams, TrainResult]:
    """Train the quantum policy; returns the final parameters and the run record."""
    init_range = InitialStateRange() if init_range is None else init_range
    rng = np.random.default_rng(train_cfg.seed)
    if theta0 is None:
        theta0 = init_params(rng)

    def episode_objective(th: np.ndarray, x0: VehicleState) -> float:
        policy = qpolicy(PolicyParams.from_array(th), enc, env)
        return run_episode(policy, x0, env, lyap, weights, train_cfg.horizon, record=False).objective

    result = train(theta0.as_array(), episode_objective, train_cfg, init_range, rng, progress)
    return PolicyParams.from_array(result.theta), result
