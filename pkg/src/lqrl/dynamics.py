"""Longitudinal car-following model integrated with forward Euler.

The controlled state is ``(z, v_r, v_e)``: spacing error relative to the
constant-time-headway gap ``d0 + h * v_e``, relative velocity ``v_l - v_e``
and ego velocity. The action is the ego acceleration ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DivergenceError


@dataclass(frozen=True, slots=True)
class VehicleState:
    z: float
    v_r: float
    v_e: float

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.v_r, self.v_e], dtype=float)

    @classmethod
    def from_array(cls, arr) -> VehicleState:
        z, v_r, v_e = (float(a) for a in arr)
        return cls(z, v_r, v_e)

    def is_finite(self) -> bool:
        return math.isfinite(self.z) and math.isfinite(self.v_r) and math.isfinite(self.v_e)


@dataclass(frozen=True)
class EnvConfig:
    """Physical and simulation constants.

    Attributes:
        dt: integration step (s)
        h: time headway (s)
        d0: standstill distance (m)
        u_min, u_max: acceleration bounds (m/s^2)
        horizon: steps per training episode
    """

    dt: float = 0.05
    h: float = 1.2
    d0: float = 5.0
    u_min: float = -3.0
    u_max: float = 3.0
    horizon: int = 400

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ConfigError(f"dt must be > 0, got {self.dt}", "dt")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ConfigError(f"h must be > 0, got {self.h}", "h")
        if not (math.isfinite(self.d0) and self.d0 >= 0):
            raise ConfigError(f"d0 must be >= 0, got {self.d0}", "d0")
        if not (math.isfinite(self.u_min) and math.isfinite(self.u_max)):
            raise ConfigError("control bounds must be finite", "u_min")
        if not self.u_min < self.u_max:
            raise ConfigError(f"u_min must be < u_max, got [{self.u_min}, {self.u_max}]", "u_min")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ConfigError(f"horizon must be an integer >= 1, got {self.horizon}", "horizon")


@dataclass(frozen=True, slots=True)
class LeadTracking:
    """Lead velocity and actual gap, carried alongside the state for logging."""

    v_l: float
    d: float


def step(state: VehicleState, u: float, a_l: float, cfg: EnvConfig) -> VehicleState:
    """Advance the state by one Euler step of length ``cfg.dt``.

    ``u`` is applied as given; clamping is the caller's job (see
    :func:`clamp_action`).
    """
    if not state.is_finite():
        raise DivergenceError(f"non-finite state {state}")
    if not (math.isfinite(u) and math.isfinite(a_l)):
        raise DivergenceError(f"non-finite input u={u}, a_l={a_l}")
    dt = cfg.dt
    return VehicleState(
        state.z + dt * (state.v_r - cfg.h * u),
        state.v_r + dt * (a_l - u),
        state.v_e + dt * u,
    )


def lead_accel(t: float) -> float:
    """Scripted lead-vehicle acceleration (m/s^2) at time ``t`` (s)."""
    return 0.8 * math.sin(0.2 * t) - 0.5 * math.sin(0.05 * t)


def clamp_action(u: float, cfg: EnvConfig) -> float:
    if not math.isfinite(u):
        raise DivergenceError(f"non-finite action u={u}")
    return min(cfg.u_max, max(cfg.u_min, u))


def initial_lead(state: VehicleState, cfg: EnvConfig) -> LeadTracking:
    """Lead velocity and gap implied by a state."""
    return LeadTracking(v_l=state.v_r + state.v_e, d=state.z + cfg.d0 + cfg.h * state.v_e)


def update_lead(
    tracking: LeadTracking,
    a_l: float,
    state_before: VehicleState,
    state_after: VehicleState,
    cfg: EnvConfig,
) -> LeadTracking:
    # state_before is accepted for symmetry with step(); the gap is rebuilt
    # from state_after so that d = z + d0 + h*v_e holds exactly.
    del state_before
    if not (math.isfinite(tracking.v_l) and math.isfinite(a_l) and state_after.is_finite()):
        raise DivergenceError("non-finite lead tracking update")
    return LeadTracking(
        v_l=tracking.v_l + cfg.dt * a_l,
        d=state_after.z + cfg.d0 + cfg.h * state_after.v_e,
    )
