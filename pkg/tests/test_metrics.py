import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqrl.lyapunov import LyapunovParams
from lqrl.metrics import StreamingMetrics, mean_abs_u, mean_vdot, report, rmse_z
from lqrl.trajectory import TrajectoryLog

series = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=1, max_size=200)
P = LyapunovParams(beta=0.6, gamma=0.05)


def test_rmse_examples():
    assert rmse_z([0.0] * 5) == 0.0
    assert rmse_z([3.0, 4.0]) == pytest.approx(math.sqrt(12.5), abs=1e-15)
    assert rmse_z([3.0, 4.0]) == pytest.approx(3.535534, abs=1e-6)
    assert rmse_z([2.0] * 17) == pytest.approx(2.0, abs=1e-15)


def test_mean_abs_u_examples():
    assert mean_abs_u([0.0, 0.0]) == 0.0
    assert mean_abs_u([1.0, -1.0]) == 1.0
    assert mean_abs_u([3.0, 0.0, 0.0]) == 1.0


def test_mean_vdot_examples():
    assert mean_vdot([0.0]) == 0.0
    assert mean_vdot([-1.0, 1.0]) == 0.0
    assert mean_vdot([2.0, 4.0, 6.0]) == 4.0


@pytest.mark.parametrize("fn", [rmse_z, mean_abs_u, mean_vdot])
def test_empty_series_rejected(fn):
    with pytest.raises(ValueError):
        fn([])


@settings(max_examples=200)
@given(series, st.floats(-100, 100))
def test_rmse_homogeneous(z, alpha):
    assert rmse_z([alpha * v for v in z]) == pytest.approx(abs(alpha) * rmse_z(z), rel=1e-12, abs=1e-300)


@settings(max_examples=200)
@given(series)
def test_rmse_dominates_mean(z):
    assert rmse_z(z) >= abs(float(np.mean(z))) * (1 - 1e-12)


def _hand_trajectory():
    traj = TrajectoryLog()
    traj.append(0.05, 3.0, 0.0, 20.0, 3.0, 0.0, 0.0, 2.0)
    traj.append(0.10, 4.0, 1.0, 15.0, 0.0, 0.0, 0.0, 4.0)
    traj.append(0.15, 0.0, 2.0, 10.0, -3.0, 0.0, 3.7, 6.0)
    return traj


def test_report_hand_computed():
    m = report(_hand_trajectory(), P, dt=0.05)
    assert m.rmse_z == pytest.approx(math.sqrt(25 / 3), abs=1e-15)
    assert m.mean_abs_u == 2.0
    assert m.mean_vdot == 4.0
    assert m.final_v == pytest.approx(0.5 * (0.6 * 4 + 0.05 * 100), abs=1e-15)
    assert m.final_v == pytest.approx(3.7, abs=1e-15)
    assert m.duration == pytest.approx(0.15, abs=1e-15)
    assert m.n_steps == 3


def test_report_reads_final_v_without_params():
    m = report(_hand_trajectory())
    assert m.final_v == 3.7
    assert m.duration == pytest.approx(0.15, rel=1e-12)


def test_single_zero_step():
    traj = TrajectoryLog()
    traj.append(0.05, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    m = report(traj, P)
    assert (m.rmse_z, m.mean_abs_u, m.mean_vdot, m.final_v) == (0.0, 0.0, 0.0, 0.0)
    assert m.duration == 0.05
    assert m.n_steps == 1


def test_mismatched_columns():
    traj = _hand_trajectory()
    traj.u.pop()
    with pytest.raises(ValueError):
        report(traj, P)


def test_streaming_matches_whole():
    rng = np.random.default_rng(4)
    n = 1000
    traj = TrajectoryLog()
    for k in range(n):
        traj.append((k + 1) * 0.05, *rng.normal(scale=[50, 10, 20, 2, 1, 100, 1000]))
    whole = report(traj, P, dt=0.05)
    stream = StreamingMetrics(P, dt=0.05)
    edges = [0, 1, 17, 250, 251, 600, 999, n]
    for a, b in zip(edges, edges[1:]):
        stream.update(traj.slice(a, b))
    part = stream.result()
    for name in ("rmse_z", "mean_abs_u", "mean_vdot", "final_v", "duration"):
        assert getattr(part, name) == pytest.approx(getattr(whole, name), rel=1e-12)
    assert part.n_steps == whole.n_steps
