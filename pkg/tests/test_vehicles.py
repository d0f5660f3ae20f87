"""Vehicle models and the RK4 integrator."""

import numpy as np
import pytest

from gvfleet import (
    UavState,
    UsvParams,
    UsvState,
    integrate_step,
    uav_derivative,
    uav_step,
    usv_derivative,
    usv_step,
)

PARAMS = UsvParams()


def random_usv_state(rng):
    return UsvState(
        q=rng.uniform(-10.0, 10.0, 2),
        psi=float(rng.uniform(-np.pi, np.pi)),
        u=float(rng.uniform(-3.0, 3.0)),
        v=float(rng.uniform(-2.0, 2.0)),
        r=float(rng.uniform(-1.5, 1.5)),
        omega=float(rng.uniform(-5.0, 5.0)),
    )


class TestUsvParams:
    def test_defaults_valid(self):
        assert PARAMS.eps1 < 0 and PARAMS.eps4 < 0 and PARAMS.eps6 < 0

    @pytest.mark.parametrize("field,value", [
        ("eps3", 0.0), ("eps5", 0.0), ("eps7", 0.0),
        ("eps1", 0.1), ("eps4", 0.0), ("eps6", 0.2),
    ])
    def test_invalid_rejected(self, field, value):
        kwargs = {field: value}
        with pytest.raises(ValueError):
            UsvParams(**kwargs)


class TestUsvDerivative:
    def test_equilibrium(self):
        state = UsvState(q=np.zeros(2), psi=0.7, u=0.0, v=0.0, r=0.0, omega=0.0)
        np.testing.assert_allclose(usv_derivative(state, PARAMS, (0.0, 0.0), 0.0), 0.0)

    def test_pure_surge(self):
        state = UsvState(q=np.zeros(2), psi=0.0, u=1.0, v=0.0, r=0.0, omega=0.0)
        d = usv_derivative(state, PARAMS, (0.5, 0.0), 0.0)
        np.testing.assert_allclose(d[:2], [1.0, 0.0])
        assert d[3] == pytest.approx(PARAMS.eps1 + PARAMS.eps3 * 0.5)

    def test_matches_termwise_evaluation(self):
        # second implementation of the right-hand side, term by term
        rng = np.random.default_rng(17)
        for _ in range(100):
            st = random_usv_state(rng)
            tau = rng.uniform(-5.0, 5.0, 2)
            u_om = float(rng.uniform(-2.0, 2.0))
            rot = np.array([[np.cos(st.psi), -np.sin(st.psi)],
                            [np.sin(st.psi), np.cos(st.psi)]])
            expected = np.concatenate([
                rot @ np.array([st.u, st.v]),
                [st.r],
                [PARAMS.eps1 * st.u + PARAMS.eps2 * st.v * st.r + PARAMS.eps3 * tau[0]],
                [PARAMS.eps6 * st.v + PARAMS.eps7 * st.u * st.r],
                [PARAMS.eps4 * st.r + PARAMS.eps5 * tau[1]],
                [u_om],
            ])
            got = usv_derivative(st, PARAMS, tau, u_om)
            np.testing.assert_allclose(got, expected, rtol=1e-14, atol=1e-14)

    def test_heading_consistency(self):
        rng = np.random.default_rng(4)
        for _ in range(30):
            st = random_usv_state(rng)
            d = usv_derivative(st, PARAMS, (0.0, 0.0), 0.0)
            rot = np.array([[np.cos(st.psi), -np.sin(st.psi)],
                            [np.sin(st.psi), np.cos(st.psi)]])
            np.testing.assert_allclose(d[:2], rot @ [st.u, st.v], rtol=1e-14, atol=1e-14)

    def test_nonfinite_rejected(self):
        state = UsvState(q=np.zeros(2), psi=0.0, u=1.0, v=0.0, r=0.0, omega=0.0)
        with pytest.raises(ValueError):
            usv_derivative(state, PARAMS, (np.nan, 0.0), 0.0)


class TestUavDerivative:
    def test_rest(self):
        state = UavState(q=np.zeros(3), p=np.zeros(3), omega=0.0)
        np.testing.assert_allclose(uav_derivative(state, np.zeros(3), 0.0), 0.0)

    def test_coasting(self):
        state = UavState(q=np.zeros(3), p=np.array([1.0, 2.0, 3.0]), omega=0.0)
        d = uav_derivative(state, np.zeros(3), 0.0)
        np.testing.assert_allclose(d[:3], [1.0, 2.0, 3.0])
        np.testing.assert_allclose(d[3:6], 0.0)

    def test_constant_accel_closed_form(self):
        # RK4 is exact for the double integrator
        state = UavState(q=np.zeros(3), p=np.zeros(3), omega=0.0)
        dt = 0.05
        for _ in range(int(round(1.0 / dt))):
            state = uav_step(state, np.array([0.0, 0.0, 1.0]), 0.0, dt)
        np.testing.assert_allclose(state.p, [0.0, 0.0, 1.0], atol=1e-12)
        assert state.q[2] == pytest.approx(0.5, abs=1e-12)

    def test_nonfinite_rejected(self):
        state = UavState(q=np.zeros(3), p=np.zeros(3), omega=0.0)
        with pytest.raises(ValueError):
            uav_derivative(state, np.array([np.inf, 0.0, 0.0]), 0.0)


class TestIntegrateStep:
    def test_zero_derivative(self):
        y = np.array([1.0, -2.0, 3.0])
        np.testing.assert_array_equal(integrate_step(lambda _: np.zeros(3), y, 0.1), y)

    @pytest.mark.parametrize("dt", [0.0, -0.01])
    def test_bad_dt(self, dt):
        with pytest.raises(ValueError):
            integrate_step(lambda y: y, np.zeros(2), dt)

    def test_usv_step_matches_fine_euler(self):
        # brute-force oracle: 1000 forward-Euler micro-steps of 1e-5
        st = UsvState(q=np.array([1.0, -1.0]), psi=0.4, u=1.2, v=0.3, r=-0.2, omega=0.5)
        tau = (2.0, -1.0)
        coarse = usv_step(st, PARAMS, tau, -1.0, 0.01).to_array()
        y = st.to_array()
        for _ in range(1000):
            d = usv_derivative(UsvState.from_array(y), PARAMS, tau, -1.0)
            y = y + 1e-5 * d
        np.testing.assert_allclose(coarse, y, atol=1e-6)

    def test_rk4_order(self):
        # halving dt must shrink the one-step error by at least 12x
        st = UsvState(q=np.zeros(2), psi=0.2, u=2.0, v=0.4, r=0.6, omega=0.0)
        tau = (1.5, 0.8)

        def deriv(y):
            return usv_derivative(UsvState.from_array(y), PARAMS, tau, -1.0)

        def fine(dt, n):
            y = st.to_array()
            for _ in range(n):
                y = integrate_step(deriv, y, dt)
            return y

        reference = fine(1e-4, 3200)
        err_full = np.max(np.abs(fine(0.32, 1) - reference))
        err_half = np.max(np.abs(fine(0.16, 2) - reference))
        assert err_full / err_half >= 12.0

    def test_open_loop_damping(self):
        st = UsvState(q=np.zeros(2), psi=0.0, u=0.2, v=0.1, r=0.15, omega=0.0)
        norms = []
        for _ in range(200):
            norms.append(np.linalg.norm([st.u, st.v, st.r]))
            st = usv_step(st, PARAMS, (0.0, 0.0), 0.0, 0.01)
        diffs = np.diff(norms)
        assert np.all(diffs <= 1e-12)
        assert norms[-1] < 0.5 * norms[0]
