"""Aggregate metrics over a logged trajectory.

All means run over the N logged steps (the initial state is not a row).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .dynamics import VehicleState
from .lyapunov import LyapunovParams, value
from .trajectory import TrajectoryLog


@dataclass(frozen=True)
class MetricsReport:
    rmse_z: float
    mean_abs_u: float
    mean_vdot: float
    final_v: float
    duration: float
    n_steps: int

    def to_dict(self) -> dict:
        return asdict(self)


def _as_series(series) -> np.ndarray:
    arr = np.asarray(series, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("metric series must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("metric series contains non-finite values")
    return arr


def rmse_z(z) -> float:
    arr = _as_series(z)
    # scale by the peak so squares of tiny values do not underflow
    peak = float(np.max(np.abs(arr)))
    if peak == 0.0:
        return 0.0
    scaled = arr / peak
    return peak * math.sqrt(float(np.sum(scaled * scaled)) / arr.size)


def mean_abs_u(u) -> float:
    arr = _as_series(u)
    return float(np.sum(np.abs(arr))) / arr.size


def mean_vdot(vdot) -> float:
    arr = _as_series(vdot)
    return float(np.sum(arr)) / arr.size


def _infer_dt(t: list[float]) -> float:
    if len(t) == 1:
        return t[0]
    return (t[-1] - t[0]) / (len(t) - 1)


def report(trajectory: TrajectoryLog, p: LyapunovParams | None = None, dt: float | None = None) -> MetricsReport:
    """Metrics for a whole trajectory.

    ``final_v`` is recomputed from the last logged state when ``p`` is given,
    otherwise it is read from the ``V`` column. ``dt`` defaults to the spacing
    of the ``t`` column (rows are stamped at the end of each step, so a
    one-row log has ``t == dt``).
    """
    trajectory.check_aligned()
    n = len(trajectory)
    if n == 0:
        raise ValueError("cannot report on an empty trajectory")
    if dt is None:
        dt = _infer_dt(trajectory.t)
    final = VehicleState(trajectory.z[-1], trajectory.v_r[-1], trajectory.v_e[-1])
    return MetricsReport(
        rmse_z=rmse_z(trajectory.z),
        mean_abs_u=mean_abs_u(trajectory.u),
        mean_vdot=mean_vdot(trajectory.Vdot),
        final_v=value(final, p) if p is not None else float(trajectory.V[-1]),
        duration=n * dt,
        n_steps=n,
    )


class StreamingMetrics:
    """Incremental version of :func:`report` for logs consumed in chunks."""

    def __init__(self, p: LyapunovParams, dt: float):
        self.p = p
        self.dt = dt
        self.n = 0
        self._sum_z2 = 0.0
        self._sum_abs_u = 0.0
        self._sum_vdot = 0.0
        self._last: VehicleState | None = None

    def update(self, chunk: TrajectoryLog) -> None:
        chunk.check_aligned()
        if len(chunk) == 0:
            return
        z = _as_series(chunk.z)
        self._sum_z2 += float(np.sum(z * z))
        self._sum_abs_u += float(np.sum(np.abs(_as_series(chunk.u))))
        self._sum_vdot += float(np.sum(_as_series(chunk.Vdot)))
        self.n += len(chunk)
        self._last = VehicleState(chunk.z[-1], chunk.v_r[-1], chunk.v_e[-1])

    def result(self) -> MetricsReport:
        if self.n == 0:
            raise ValueError("no samples accumulated")
        return MetricsReport(
            rmse_z=math.sqrt(self._sum_z2 / self.n),
            mean_abs_u=self._sum_abs_u / self.n,
            mean_vdot=self._sum_vdot / self.n,
            final_v=value(self._last, self.p),
            duration=self.n * self.dt,
            n_steps=self.n,
        )
