"""Quadratic Lyapunov candidate and the hinge penalty on its decrease condition.

V(x) = 0.5 * (z^2 + beta * v_r^2 + gamma * v_e^2)

The ``gamma * v_e * u`` term in dV/dt means V is not a control-Lyapunov
function for this plant: at any nonzero cruising speed with ``u > 0`` the
derivative can be positive even at zero spacing error. The penalty is used
as a soft training signal, not as a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import EnvConfig, VehicleState
from .errors import ConfigError


@dataclass(frozen=True)
class LyapunovParams:
    beta: float = 0.6
    gamma: float = 0.05
    c: float = 0.05
    lam: float = 2.0

    def __post_init__(self):
        for name in ("beta", "gamma", "c"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ConfigError(f"{name} must be > 0, got {val}", name)
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise ConfigError(f"lambda must be >= 0, got {self.lam}", "lambda")


def value(x: VehicleState, p: LyapunovParams) -> float:
    return 0.5 * (x.z * x.z + p.beta * x.v_r * x.v_r + p.gamma * x.v_e * x.v_e)


def derivative(x: VehicleState, u: float, a_l: float, p: LyapunovParams, cfg: EnvConfig) -> float:
    """Time derivative of V along the continuous dynamics (analytic)."""
    return x.z * (x.v_r - cfg.h * u) + p.beta * x.v_r * (a_l - u) + p.gamma * x.v_e * u


def decrease_margin(x: VehicleState, u: float, a_l: float, p: LyapunovParams, cfg: EnvConfig) -> float:
    """``dV/dt + c*V``; non-positive when the decrease condition holds."""
    return derivative(x, u, a_l, p, cfg) + p.c * value(x, p)


def condition_satisfied(x: VehicleState, u: float, a_l: float, p: LyapunovParams, cfg: EnvConfig) -> bool:
    return decrease_margin(x, u, a_l, p, cfg) <= 0.0


def penalty(x: VehicleState, u: float, a_l: float, p: LyapunovParams, cfg: EnvConfig) -> float:
    margin = decrease_margin(x, u, a_l, p, cfg)
    if margin <= 0.0:
        return 0.0
    return p.lam * margin
