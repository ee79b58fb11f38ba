"""Single-qubit variational policy simulated with exact complex amplitudes.

Circuit, starting from |0>, gates applied in the order listed::

    Rx(phi_z + t1) -> Ry(phi_vr + t2) -> Rz(phi_ve + t3)    # data layer
    Ry(t4) -> Rz(t5)                                        # trainable layer

then ``m = <Z>``, ``raw = tanh(s*m + b)`` and ``raw`` is mapped affinely onto
``[u_min, u_max]``.

Because the final gate is an Rz, ``t5`` only changes the global/relative
phase before a Z measurement and therefore never affects the action. It is
kept so the parameter vector has the published 7-entry layout.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dynamics import EnvConfig, VehicleState
from .errors import ConfigError

N_PARAMS = 7


class QubitState(NamedTuple):
    amp0: complex
    amp1: complex

    def norm_sq(self) -> float:
        return abs(self.amp0) ** 2 + abs(self.amp1) ** 2


ZERO = QubitState(1 + 0j, 0j)


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * theta), 0], [0, cmath.exp(0.5j * theta)]], dtype=complex)


def is_unitary(gate: np.ndarray, atol: float = 1e-12) -> bool:
    gate = np.asarray(gate)
    if gate.shape != (2, 2):
        return False
    return bool(np.allclose(gate.conj().T @ gate, np.eye(2), rtol=0, atol=atol))


def apply(gate: np.ndarray, q: QubitState, validate: bool = False) -> QubitState:
    """Return ``gate @ q``. With ``validate`` set, non-unitary gates are rejected."""
    if validate and not is_unitary(gate):
        raise ValueError(f"gate is not unitary:\n{gate}")
    g = np.asarray(gate)
    a0 = complex(g[0, 0]) * q.amp0 + complex(g[0, 1]) * q.amp1
    a1 = complex(g[1, 0]) * q.amp0 + complex(g[1, 1]) * q.amp1
    return QubitState(a0, a1)


def expectation_z(q: QubitState) -> float:
    """``|a0|^2 - |a1|^2`` over the state norm, so rounding drift in the norm cancels."""
    p0 = q.amp0.real * q.amp0.real + q.amp0.imag * q.amp0.imag
    p1 = q.amp1.real * q.amp1.real + q.amp1.imag * q.amp1.imag
    return (p0 - p1) / (p0 + p1)


@dataclass(frozen=True)
class EncodingConfig:
    """Scales for squashing the state into rotation angles.

    ``phi_i = angle_gain * tanh(x_i / scale_i)``.
    """

    z_scale: float = 10.0
    v_scale: float = 10.0
    ve_scale: float = 30.0
    angle_gain: float = math.pi

    def __post_init__(self):
        for name in ("z_scale", "v_scale", "ve_scale", "angle_gain"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ConfigError(f"{name} must be > 0, got {val}", name)


def encode(x: VehicleState, enc: EncodingConfig) -> tuple[float, float, float]:
    g = enc.angle_gain
    return (
        g * math.tanh(x.z / enc.z_scale),
        g * math.tanh(x.v_r / enc.v_scale),
        g * math.tanh(x.v_e / enc.ve_scale),
    )


@dataclass(frozen=True)
class PolicyParams:
    theta1: float
    theta2: float
    theta3: float
    theta4: float
    theta5: float
    s: float
    b: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.as_tuple()):
            raise ValueError(f"policy parameters must be finite: {self.as_tuple()}")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.theta1, self.theta2, self.theta3, self.theta4, self.theta5, self.s, self.b)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @classmethod
    def from_array(cls, arr) -> PolicyParams:
        vals = [float(v) for v in arr]
        if len(vals) != N_PARAMS:
            raise ValueError(f"expected {N_PARAMS} parameters, got {len(vals)}")
        return cls(*vals)


def init_params(rng: np.random.Generator) -> PolicyParams:
    """Small random angles near the identity circuit, unit scale, zero bias."""
    angles = rng.uniform(-0.1, 0.1, size=5)
    return PolicyParams(*(float(a) for a in angles), s=1.0, b=0.0)


def circuit_state(theta: PolicyParams, x: VehicleState, enc: EncodingConfig) -> QubitState:
    """Final qubit state of the policy circuit, computed with scalar complex arithmetic."""
    phi_z, phi_vr, phi_ve = encode(x, enc)

    # Rx on |0>
    c, s = math.cos(0.5 * (phi_z + theta.theta1)), math.sin(0.5 * (phi_z + theta.theta1))
    a0, a1 = complex(c, 0.0), complex(0.0, -s)
    # Ry
    c, s = math.cos(0.5 * (phi_vr + theta.theta2)), math.sin(0.5 * (phi_vr + theta.theta2))
    a0, a1 = c * a0 - s * a1, s * a0 + c * a1
    # Rz
    ph = cmath.exp(-0.5j * (phi_ve + theta.theta3))
    a0, a1 = ph * a0, ph.conjugate() * a1
    # Ry
    c, s = math.cos(0.5 * theta.theta4), math.sin(0.5 * theta.theta4)
    a0, a1 = c * a0 - s * a1, s * a0 + c * a1
    # Rz
    ph = cmath.exp(-0.5j * theta.theta5)
    return QubitState(ph * a0, ph.conjugate() * a1)


def forward(theta: PolicyParams, x: VehicleState, enc: EncodingConfig, cfg: EnvConfig) -> float:
    """Deterministic action in ``[u_min, u_max]`` for state ``x``."""
    m = expectation_z(circuit_state(theta, x, enc))
    raw = math.tanh(theta.s * m + theta.b)
    return cfg.u_min + 0.5 * (raw + 1.0) * (cfg.u_max - cfg.u_min)
