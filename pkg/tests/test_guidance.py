"""Upper-level guidance laws for both vehicle kinds."""

import numpy as np
import pytest

from gvfleet import (
    GuidanceGains,
    chain_topology,
    desired_coordinate_rate,
    exchange,
    gvf_augmented,
    lissajous_path,
    circle_path,
    path_error,
    ring_topology,
    uav_guidance,
    usv_guidance,
)
from gvfleet.network import consensus_term

CIRCLE = circle_path((-40.0, 50.0), 10.0)
LISS = lissajous_path([16.0, 6.0, -2.0], [0.5, 1.0, 1.0],
                      [0.0, np.pi / 2.0, 0.0], [0.0, 0.0, 0.0])
GAINS2 = GuidanceGains(k=np.array([1.5, 1.5]), c=2.0)
GAINS3 = GuidanceGains(k=np.array([1.5, 1.5, 1.5]), c=2.0)


def zero_residual_view(n=2):
    return exchange(np.zeros(n), ring_topology(n) if n > 2 else chain_topology(n))[0]


class TestUsvGuidance:
    def test_on_path_zero_heading(self):
        # circle at w=0: df=(0,10); on path, zero residuals, psi=0
        err = path_error(CIRCLE, [-30.0, 50.0], 0.0)
        cmd = usv_guidance(0.0, err, CIRCLE.df(np.asarray(0.0)),
                           zero_residual_view(), GAINS2)
        np.testing.assert_allclose(cmd.velocity, [0.0, -10.0], atol=1e-12)
        assert cmd.coordinate_rate == pytest.approx(-1.0)

    @pytest.mark.parametrize("psi", [-2.5, 0.0, 0.9, 3.1])
    def test_on_path_rate_independent_of_heading(self, psi):
        err = path_error(CIRCLE, eval_path_point(1.2), 1.2)
        cmd = usv_guidance(psi, err, CIRCLE.df(np.asarray(1.2)),
                           zero_residual_view(), GAINS2)
        assert cmd.coordinate_rate == pytest.approx(-1.0, abs=1e-12)

    def test_rotation_consistency(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            psi = float(rng.uniform(-np.pi, np.pi))
            omega = float(rng.uniform(-5.0, 5.0))
            q = rng.uniform(-60.0, 0.0, 2)
            err = path_error(CIRCLE, q, omega)
            df = CIRCLE.df(np.asarray(omega))
            cmd = usv_guidance(psi, err, df, zero_residual_view(), GAINS2)
            rot = np.array([[np.cos(psi), -np.sin(psi)],
                            [np.sin(psi), np.cos(psi)]])
            inertial = rot @ cmd.velocity
            np.testing.assert_allclose(inertial, -df - GAINS2.k * err.phi,
                                       rtol=1e-12, atol=1e-12)


class TestUavGuidance:
    def test_on_path(self):
        omega = 0.7
        err = path_error(LISS, LISS.f(np.asarray(omega)), omega)
        df = LISS.df(np.asarray(omega))
        cmd = uav_guidance(err, df, zero_residual_view(), GAINS3)
        np.testing.assert_allclose(cmd.velocity, -df, atol=1e-12)
        assert cmd.coordinate_rate == pytest.approx(-1.0)

    def test_worked_example_off_path(self):
        # q=(17,0,-2) at w=0: phi=(1,0,0); df(0)=(0,-6,0); independent evaluation
        err = path_error(LISS, [17.0, 0.0, -2.0], 0.0)
        df = LISS.df(np.asarray(0.0))
        np.testing.assert_allclose(err.phi, [1.0, 0.0, 0.0], atol=1e-12)
        np.testing.assert_allclose(df, [0.0, -6.0, 0.0], atol=1e-12)
        cmd = uav_guidance(err, df, zero_residual_view(), GAINS3)
        expected_v = np.array([-0.0 - 1.5 * 1.0, 6.0 - 0.0, -0.0 - 0.0])
        np.testing.assert_allclose(cmd.velocity, expected_v, atol=1e-12)
        assert cmd.coordinate_rate == pytest.approx(-1.0 + 1.5 * 1.0 * 0.0, abs=1e-12)

    def test_single_neighbor_residual(self):
        # phi=0, one neighbor with residual 1, c=2 -> u_omega = -1 - 2
        topo = chain_topology(2)
        view = exchange(np.array([1.0, 0.0]), topo)[0]
        omega = 1.0
        err = path_error(LISS, LISS.f(np.asarray(omega)), omega)
        cmd = uav_guidance(err, LISS.df(np.asarray(omega)), view, GAINS3)
        assert cmd.coordinate_rate == pytest.approx(-3.0)


class TestProjectionIdentity:
    def test_usv_matches_augmented_field(self):
        rng = np.random.default_rng(13)
        topo = ring_topology(3)
        for _ in range(50):
            omega_all = rng.uniform(-3.0, 3.0, 3)
            views = exchange(omega_all, topo)
            psi = float(rng.uniform(-np.pi, np.pi))
            q = rng.uniform(-60.0, 0.0, 2)
            err = path_error(CIRCLE, q, omega_all[0])
            df = CIRCLE.df(np.asarray(omega_all[0]))
            cmd = usv_guidance(psi, err, df, views[0], GAINS2)
            chi = gvf_augmented(CIRCLE, q, omega_all[0], GAINS2.k)
            rot = np.array([[np.cos(psi), -np.sin(psi)],
                            [np.sin(psi), np.cos(psi)]])
            np.testing.assert_allclose(rot @ cmd.velocity, chi[:2], rtol=1e-12, atol=1e-12)
            expected_rate = chi[2] + consensus_term(views[0], GAINS2.c)
            assert cmd.coordinate_rate == pytest.approx(expected_rate, abs=1e-12)

    def test_uav_matches_augmented_field(self):
        rng = np.random.default_rng(14)
        topo = ring_topology(3)
        for _ in range(50):
            omega_all = rng.uniform(-3.0, 3.0, 3)
            views = exchange(omega_all, topo)
            q = rng.uniform(-20.0, 20.0, 3)
            err = path_error(LISS, q, omega_all[1])
            df = LISS.df(np.asarray(omega_all[1]))
            cmd = uav_guidance(err, df, views[1], GAINS3)
            chi = gvf_augmented(LISS, q, omega_all[1], GAINS3.k)
            np.testing.assert_allclose(cmd.velocity, chi[:3], rtol=1e-12, atol=1e-12)
            expected_rate = chi[3] + consensus_term(views[1], GAINS3.c)
            assert cmd.coordinate_rate == pytest.approx(expected_rate, abs=1e-12)


class TestDesiredRate:
    def test_constant_value(self):
        assert desired_coordinate_rate() == -1.0

    def test_matches_laws_at_equilibrium(self):
        err2 = path_error(CIRCLE, eval_path_point(2.0), 2.0)
        usv_cmd = usv_guidance(1.1, err2, CIRCLE.df(np.asarray(2.0)),
                               zero_residual_view(), GAINS2)
        err3 = path_error(LISS, LISS.f(np.asarray(2.0)), 2.0)
        uav_cmd = uav_guidance(err3, LISS.df(np.asarray(2.0)),
                               zero_residual_view(), GAINS3)
        assert usv_cmd.coordinate_rate == pytest.approx(desired_coordinate_rate())
        assert uav_cmd.coordinate_rate == pytest.approx(desired_coordinate_rate())


class TestGains:
    def test_positive_required(self):
        with pytest.raises(ValueError):
            GuidanceGains(k=np.array([1.5, 0.0]), c=2.0)
        with pytest.raises(ValueError):
            GuidanceGains(k=np.array([1.5, 1.5]), c=-1.0)


def eval_path_point(omega):
    return CIRCLE.f(np.asarray(omega))
