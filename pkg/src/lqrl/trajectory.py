"""Per-step trajectory record shared by the simulator, metrics and CSV I/O."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

COLUMNS = ("t", "z", "v_r", "v_e", "u", "a_l", "V", "Vdot")


@dataclass
class TrajectoryLog:
    """Parallel per-step series.

    Row ``k`` (``k = 1..N``) describes the k-th Euler step: ``t`` is the time
    at the end of the step, ``z``/``v_r``/``v_e`` and ``V`` are evaluated at the
    post-step state, ``u`` is the clamped action applied during the step,
    ``a_l`` the lead acceleration used, and ``Vdot`` the analytic Lyapunov
    derivative at the pre-step state under that ``u`` and ``a_l`` (the rate
    that actually drove the step). The initial state is not a row.
    """

    t: list[float] = field(default_factory=list)
    z: list[float] = field(default_factory=list)
    v_r: list[float] = field(default_factory=list)
    v_e: list[float] = field(default_factory=list)
    u: list[float] = field(default_factory=list)
    a_l: list[float] = field(default_factory=list)
    V: list[float] = field(default_factory=list)
    Vdot: list[float] = field(default_factory=list)

    def append(self, t, z, v_r, v_e, u, a_l, V, Vdot) -> None:
        self.t.append(t)
        self.z.append(z)
        self.v_r.append(v_r)
        self.v_e.append(v_e)
        self.u.append(u)
        self.a_l.append(a_l)
        self.V.append(V)
        self.Vdot.append(Vdot)

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        return np.asarray(getattr(self, name), dtype=float)

    def check_aligned(self) -> None:
        lengths = {f.name: len(getattr(self, f.name)) for f in fields(self)}
        if len(set(lengths.values())) != 1:
            raise ValueError(f"trajectory columns have mismatched lengths: {lengths}")

    def rows(self):
        self.check_aligned()
        return zip(*(getattr(self, name) for name in COLUMNS))

    def slice(self, start: int, stop: int) -> TrajectoryLog:
        return TrajectoryLog(**{name: getattr(self, name)[start:stop] for name in COLUMNS})
