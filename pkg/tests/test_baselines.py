import math

import numpy as np
import pytest

from lqrl.baselines import (
    LinearPolicyParams,
    PidController,
    PidParams,
    PidState,
    compare,
    linear_forward,
    linear_policy,
    pid_step,
    zero_policy,
)
from lqrl.dynamics import EnvConfig, VehicleState
from lqrl.errors import ConfigError

X0 = VehicleState(0.0, 0.0, 20.0)


class TestPid:
    def test_zero_error_stream(self, env):
        state = PidState()
        for _ in range(100):
            u, state = pid_step(state, 0.0, env.dt, PidParams(), env)
            assert u == 0.0
        assert state == PidState(0.0, 0.0)

    def test_proportional_only(self, env):
        u, _ = pid_step(PidState(), 2.0, env.dt, PidParams(kp=1.0, ki=0.0, kd=0.0), env)
        assert u == 2.0

    def test_clamp_engages(self, env):
        u, _ = pid_step(PidState(), 2.0, env.dt, PidParams(kp=5.0, ki=0.0, kd=0.0), env)
        assert u == 3.0

    def test_derivative_term(self, env):
        params = PidParams(kp=0.0, ki=0.0, kd=0.1)
        _, st = pid_step(PidState(), 1.0, 0.05, params, env)
        u, _ = pid_step(st, 1.5, 0.05, params, env)
        assert u == pytest.approx(0.1 * 0.5 / 0.05)

    def test_anti_windup(self, env):
        params = PidParams(ki=1.0, integral_limit=0.5)
        state = PidState()
        for z in np.concatenate([np.full(500, 40.0), np.full(500, -40.0)]):
            _, state = pid_step(state, z, env.dt, params, env)
            assert abs(state.integral) <= 0.5

    def test_bad_dt(self, env):
        with pytest.raises(ValueError):
            pid_step(PidState(), 1.0, 0.0, PidParams(), env)

    def test_bad_params(self):
        with pytest.raises(ConfigError):
            PidParams(integral_limit=0.0)
        with pytest.raises(ConfigError):
            PidParams(kp=math.inf)


class TestLinear:
    def test_zero_gains(self, env):
        assert linear_forward(LinearPolicyParams(), VehicleState(3, -2, 25), env, 20.0) == 0.0

    def test_spacing_gain(self, env):
        assert linear_forward(LinearPolicyParams(k_z=0.5), VehicleState(2, 0, 20), env, 20.0) == 1.0

    def test_bounded(self, env):
        rng = np.random.default_rng(1)
        for g, x in zip(rng.normal(scale=5, size=(2000, 4)), rng.normal(scale=30, size=(2000, 3))):
            u = linear_forward(LinearPolicyParams(*g), VehicleState(*x), env, 20.0)
            assert env.u_min <= u <= env.u_max


class TestCompare:
    def run(self, controllers, env, lyap, weights):
        return compare(controllers, X0, env, lyap, weights, steps=600, z_bound=20.0)

    def test_identical_controllers(self, env, lyap, weights):
        rows = self.run([("a", lambda: PidController(PidParams(), env)), ("b", lambda: PidController(PidParams(), env))], env, lyap, weights)
        assert (rows[0].rmse_z, rows[0].mean_abs_u, rows[0].stable) == (rows[1].rmse_z, rows[1].mean_abs_u, rows[1].stable)

    def test_pid_beats_zero_action(self, env, lyap, weights):
        rows = self.run([("zero", lambda: zero_policy), ("pid", lambda: PidController(PidParams(), env))], env, lyap, weights)
        assert rows[1].rmse_z < rows[0].rmse_z
        assert rows[1].stable
        assert not rows[0].stable

    def test_order_preserved(self, env, lyap, weights):
        names = ["z", "p", "l"]
        factories = {
            "z": lambda: zero_policy,
            "p": lambda: PidController(PidParams(), env),
            "l": lambda: linear_policy(LinearPolicyParams(k_z=0.5, k_vr=0.8), env, 20.0),
        }
        rows = self.run([(n, factories[n]) for n in names], env, lyap, weights)
        assert [r.controller for r in rows] == names

    def test_diverged_row(self, env, lyap, weights):
        rows = self.run([("bad", lambda: (lambda x: math.nan))], env, lyap, weights)
        assert rows[0].diverged
        assert rows[0].flag == "diverged"

    def test_deterministic(self, env, lyap, weights):
        ctrls = [("pid", lambda: PidController(PidParams(), env))]
        assert self.run(ctrls, env, lyap, weights) == self.run(ctrls, env, lyap, weights)
