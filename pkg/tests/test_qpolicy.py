import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lqrl.dynamics import EnvConfig, VehicleState
from lqrl.errors import ConfigError
from lqrl.qpolicy import (
    ZERO,
    EncodingConfig,
    PolicyParams,
    QubitState,
    apply,
    circuit_state,
    encode,
    expectation_z,
    forward,
    init_params,
    is_unitary,
    rx,
    ry,
    rz,
)

angle = st.floats(min_value=-20, max_value=20, allow_nan=False)
ENV = EnvConfig()
ENC = EncodingConfig()


def reference_state(theta: PolicyParams, x: VehicleState, enc: EncodingConfig) -> QubitState:
    """Oracle: the circuit built from explicit 2x2 matrices."""
    phi_z, phi_vr, phi_ve = encode(x, enc)
    psi = np.array([1, 0], dtype=complex)
    for gate in (
        rx(phi_z + theta.theta1),
        ry(phi_vr + theta.theta2),
        rz(phi_ve + theta.theta3),
        ry(theta.theta4),
        rz(theta.theta5),
    ):
        psi = gate @ psi
    return QubitState(complex(psi[0]), complex(psi[1]))


class TestGates:
    def test_rx_zero_is_identity(self):
        np.testing.assert_array_equal(rx(0.0), np.eye(2))

    def test_ry_pi_flips(self):
        q = apply(ry(math.pi), ZERO)
        assert abs(q.amp0) < 1e-15
        assert q.amp1 == pytest.approx(1.0, abs=1e-15)

    def test_rx_pi_on_zero(self):
        q = apply(rx(math.pi), ZERO)
        assert q.amp0 == pytest.approx(0.0, abs=1e-15)
        assert q.amp1 == pytest.approx(-1j, abs=1e-15)

    @settings(max_examples=100)
    @given(angle)
    def test_rz_keeps_basis_expectation(self, t):
        assert expectation_z(apply(rz(t), ZERO)) == 1.0
        assert expectation_z(apply(rz(t), QubitState(0j, 1 + 0j))) == -1.0

    def test_matrices_match_definitions(self):
        t = 0.731
        c, s = math.cos(t / 2), math.sin(t / 2)
        np.testing.assert_allclose(rx(t), [[c, -1j * s], [-1j * s, c]], atol=0)
        np.testing.assert_allclose(ry(t), [[c, -s], [s, c]], atol=0)
        np.testing.assert_allclose(rz(t), [[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]], atol=1e-16)

    @settings(max_examples=200)
    @given(angle)
    def test_unitary_with_unit_determinant(self, t):
        for g in (rx(t), ry(t), rz(t)):
            assert is_unitary(g, atol=1e-12)
            assert abs(np.linalg.det(g)) == pytest.approx(1.0, abs=1e-12)

    def test_identity_apply(self):
        q = QubitState(0.6 + 0j, 0.8j)
        assert apply(np.eye(2, dtype=complex), q) == q

    @settings(max_examples=100)
    @given(angle, angle)
    def test_rz_additivity(self, a, b):
        q = apply(ry(0.9), ZERO)
        seq = apply(rz(b), apply(rz(a), q))
        once = apply(rz(a + b), q)
        assert expectation_z(seq) == pytest.approx(expectation_z(once), abs=1e-12)
        # same state up to a global phase: |<seq|once>| = 1
        overlap = seq.amp0.conjugate() * once.amp0 + seq.amp1.conjugate() * once.amp1
        assert abs(overlap) == pytest.approx(1.0, abs=1e-12)

    def test_validation_rejects_non_unitary(self):
        with pytest.raises(ValueError):
            apply(np.array([[1, 1], [0, 1]], dtype=complex), ZERO, validate=True)

    def test_norm_preserved_random_sequences(self):
        rng = np.random.default_rng(3)
        gates = (rx, ry, rz)
        for _ in range(500):
            q = ZERO
            for _ in range(20):
                q = apply(gates[rng.integers(3)](rng.uniform(-10, 10)), q)
            assert q.norm_sq() == pytest.approx(1.0, abs=1e-10)
            assert -1.0 <= expectation_z(q) <= 1.0


class TestExpectation:
    @pytest.mark.parametrize(
        "q,expected",
        [
            (QubitState(1 + 0j, 0j), 1.0),
            (QubitState(1 / math.sqrt(2) + 0j, 1 / math.sqrt(2) + 0j), 0.0),
            (QubitState(0.6 + 0j, 0.8j), -0.28),
        ],
    )
    def test_values(self, q, expected):
        assert expectation_z(q) == pytest.approx(expected, abs=1e-15)


class TestEncode:
    def test_origin(self):
        assert encode(VehicleState(0, 0, 0), ENC) == (0.0, 0.0, 0.0)

    def test_z_scale(self):
        phi_z, _, _ = encode(VehicleState(10, 0, 0), ENC)
        assert phi_z == pytest.approx(math.pi * math.tanh(1.0), abs=1e-15)
        assert phi_z == pytest.approx(2.392619, abs=1e-6)

    def test_monotone_and_bounded(self):
        zs = np.linspace(-30, 30, 1001)
        phis = [encode(VehicleState(z, 0, 0), ENC)[0] for z in zs]
        assert all(b > a for a, b in zip(phis, phis[1:]))
        assert max(abs(p) for p in phis) < ENC.angle_gain

    def test_invalid_scale(self):
        with pytest.raises(ConfigError):
            EncodingConfig(z_scale=0.0)


class TestForward:
    def test_identity_circuit(self):
        theta = PolicyParams(0, 0, 0, 0, 0, 1.0, 0.0)
        assert forward(theta, VehicleState(0, 0, 0), ENC, ENV) == pytest.approx(3 * math.tanh(1.0), abs=1e-14)
        assert forward(theta, VehicleState(0, 0, 0), ENC, ENV) == pytest.approx(2.284782, abs=1e-6)

    def test_midpoint_when_preactivation_zero(self):
        theta = PolicyParams(0.3, -0.2, 0.1, 0.5, 0.0, 0.0, 0.0)
        assert forward(theta, VehicleState(1.0, 2.0, 20.0), ENC, ENV) == 0.0

    @settings(max_examples=300)
    @given(
        st.lists(st.floats(-10, 10), min_size=5, max_size=5),
        st.floats(-5, 5),
        st.floats(-5, 5),
        st.floats(-1e3, 1e3),
        st.floats(-1e3, 1e3),
        st.floats(-1e3, 1e3),
    )
    def test_matches_matrix_oracle(self, angles, s, b, z, vr, ve):
        theta = PolicyParams(*angles, s, b)
        x = VehicleState(z, vr, ve)
        fast = circuit_state(theta, x, ENC)
        ref = reference_state(theta, x, ENC)
        assert fast.amp0 == pytest.approx(ref.amp0, abs=1e-12)
        assert fast.amp1 == pytest.approx(ref.amp1, abs=1e-12)
        u = forward(theta, x, ENC, ENV)
        m = expectation_z(ref)
        assert u == pytest.approx(-3 + 0.5 * (math.tanh(s * m + b) + 1) * 6, abs=1e-12)
        # moderate s, b keep tanh away from +-1, so the action is strictly inside the bounds
        assert ENV.u_min < u < ENV.u_max

    def test_deterministic(self):
        theta = init_params(np.random.default_rng(5))
        x = VehicleState(-3.2, 0.4, 18.0)
        assert forward(theta, x, ENC, ENV) == forward(theta, x, ENC, ENV)

    def test_saturation_bounds_random(self):
        rng = np.random.default_rng(7)
        thetas = rng.normal(scale=5.0, size=(100_000, 7))
        thetas[:, 5:] *= 10  # include saturating s and b
        xs = rng.normal(scale=[50, 20, 30], size=(100_000, 3))
        for th, x in zip(thetas, xs):
            u = forward(PolicyParams.from_array(th), VehicleState(*x), ENC, ENV)
            assert ENV.u_min <= u <= ENV.u_max

    def test_final_rz_never_changes_action(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            th = rng.uniform(-3, 3, size=7)
            x = VehicleState(*rng.normal(scale=[5, 3, 20]))
            u0 = forward(PolicyParams.from_array(th), x, ENC, ENV)
            th[4] += rng.uniform(-5, 5)
            assert forward(PolicyParams.from_array(th), x, ENC, ENV) == pytest.approx(u0, abs=1e-12)

    def test_rz_after_basis_state(self):
        # theta4 such that the state before the final Rz is a basis state:
        # from |0>, identity data layer (x=0, t1..t3 = 0) and Ry(pi) -> |1>
        for t5 in np.linspace(-6, 6, 25):
            q = circuit_state(PolicyParams(0, 0, 0, math.pi, t5, 1, 0), VehicleState(0, 0, 0), ENC)
            assert expectation_z(q) == pytest.approx(-1.0, abs=1e-15)


class TestParams:
    def test_roundtrip_array(self):
        p = PolicyParams(1, 2, 3, 4, 5, 6, 7)
        assert PolicyParams.from_array(p.as_array()) == p

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            PolicyParams.from_array([0.0] * 6)

    def test_non_finite(self):
        with pytest.raises(ValueError):
            PolicyParams(0, 0, 0, 0, math.nan, 1, 0)

    def test_init_params(self):
        p = init_params(np.random.default_rng(0))
        assert all(-0.1 <= v <= 0.1 for v in p.as_tuple()[:5])
        assert (p.s, p.b) == (1.0, 0.0)
        assert init_params(np.random.default_rng(0)) == p
