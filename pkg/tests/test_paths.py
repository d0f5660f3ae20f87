"""Path definitions, path errors, and both guiding vector fields."""

import numpy as np
import pytest

from gvfleet import (
    UnsupportedPathError,
    circle_path,
    custom_path,
    eval_path,
    gvf_augmented,
    gvf_physical,
    lissajous_path,
    path_error,
)
from gvfleet.paths import bounds_report, validate_partials

CIRCLE = circle_path((-40.0, 50.0), 10.0)
CIRCLE_3D = circle_path((-40.0, 50.0), 10.0, altitude=20.0)
LISS = lissajous_path([16.0, 6.0, -2.0], [0.5, 1.0, 1.0],
                      [0.0, np.pi / 2.0, 0.0], [0.0, -7.0, 0.0])


class TestEvalPath:
    def test_circle_at_zero(self):
        np.testing.assert_allclose(eval_path(CIRCLE, 0.0), [-30.0, 50.0], atol=1e-12)

    def test_circle_quarter_turn(self):
        np.testing.assert_allclose(eval_path(CIRCLE, np.pi / 2.0), [-40.0, 60.0],
                                   atol=1e-12)

    def test_lissajous_with_offset(self):
        np.testing.assert_allclose(eval_path(LISS, 0.0), [16.0, -7.0, -2.0], atol=1e-12)

    def test_altitude_is_constant(self):
        omega = np.linspace(-7.0, 7.0, 33)
        assert np.all(eval_path(CIRCLE_3D, omega)[:, 2] == 20.0)

    def test_nonfinite_omega_rejected(self):
        with pytest.raises(ValueError):
            eval_path(CIRCLE, np.nan)

    def test_periods(self):
        assert CIRCLE.period == pytest.approx(2.0 * np.pi)
        assert LISS.period == pytest.approx(4.0 * np.pi)


class TestPathError:
    def test_on_path_is_zero(self):
        err = path_error(CIRCLE, eval_path(CIRCLE, 1.3), 1.3)
        np.testing.assert_allclose(err.phi, 0.0, atol=1e-12)

    def test_circle_offset(self):
        err = path_error(CIRCLE, [-29.0, 50.0], 0.0)
        np.testing.assert_allclose(err.phi, [1.0, 0.0], atol=1e-12)

    def test_lissajous_offset(self):
        err = path_error(LISS, [16.0, -7.0, 0.0], 0.0)
        np.testing.assert_allclose(err.phi, [0.0, 0.0, 2.0], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            path_error(CIRCLE, [1.0, 2.0, 3.0], 0.0)

    def test_norm(self):
        assert path_error(CIRCLE, [-29.0, 51.0], 0.0).norm == pytest.approx(np.sqrt(2))


class TestGvfPhysical:
    def test_on_path_is_tangent(self):
        # gradient term vanishes on the path; rotated gradient remains
        chi = gvf_physical(CIRCLE, [-30.0, 50.0], [1.0])
        np.testing.assert_allclose(chi, [0.0, 20.0], atol=1e-12)

    def test_center_is_singular(self):
        chi = gvf_physical(CIRCLE, [-40.0, 50.0], [1.5])
        assert np.linalg.norm(chi) == 0.0

    def test_matches_direct_evaluation(self):
        # independent evaluation of both terms from the level-set definition
        rng = np.random.default_rng(3)
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        for _ in range(50):
            q = rng.uniform(-80.0, 0.0, 2)
            k = float(rng.uniform(0.1, 3.0))
            rel = q - np.array([-40.0, 50.0])
            level = rel @ rel - 100.0
            grad = 2.0 * rel
            expected = rot @ grad - k * level * grad
            np.testing.assert_allclose(gvf_physical(CIRCLE, q, [k]), expected,
                                       rtol=1e-12, atol=1e-12)

    def test_unsupported_kinds(self):
        with pytest.raises(UnsupportedPathError):
            gvf_physical(LISS, [0.0, 0.0, 0.0], [1.0, 1.0])
        with pytest.raises(UnsupportedPathError):
            gvf_physical(CIRCLE_3D, [0.0, 0.0, 0.0], [1.0, 1.0])


class TestGvfAugmented:
    def test_on_path_components(self):
        for omega in (-2.0, 0.0, 0.7, 4.0):
            q = eval_path(CIRCLE, omega)
            chi = gvf_augmented(CIRCLE, q, omega, [1.5, 1.5])
            df = CIRCLE.df(np.asarray(omega))
            np.testing.assert_allclose(chi[:2], -df, atol=1e-12)
            assert chi[2] == pytest.approx(-1.0)

    def test_worked_example(self):
        # q=(-28,50), w=0: phi=(2,0), df=(0,10) -> (-3, -10, -1)
        chi = gvf_augmented(CIRCLE, [-28.0, 50.0], 0.0, [1.5, 1.5], sign=-1.0)
        np.testing.assert_allclose(chi, [-3.0, -10.0, -1.0], atol=1e-12)

    def test_matches_componentwise_evaluation(self):
        rng = np.random.default_rng(8)
        for path in (CIRCLE, LISS):
            for _ in range(50):
                omega = float(rng.uniform(-10.0, 10.0))
                q = rng.uniform(-30.0, 30.0, path.dim)
                k = rng.uniform(0.2, 3.0, path.dim)
                sign = float(rng.choice([-1.0, 1.0]))
                f = path.f(np.asarray(omega))
                df = path.df(np.asarray(omega))
                phi = q - f
                expected = np.empty(path.dim + 1)
                expected[: path.dim] = sign * df - k * phi
                expected[path.dim] = sign + float(np.sum(k * phi * df))
                got = gvf_augmented(path, q, omega, k, sign=sign)
                np.testing.assert_allclose(got, expected, rtol=1e-12, atol=1e-12)

    def test_zero_spatial_forces_nonzero_last(self):
        # if the spatial components vanish, last = sign*(1 + |df|^2)
        rng = np.random.default_rng(5)
        for path in (CIRCLE, LISS):
            k = np.full(path.dim, 1.5)
            omega = rng.uniform(-8.0, 8.0, 64)
            df = path.df(omega)
            q = path.f(omega) + (-1.0) * df / k
            chi = gvf_augmented(path, q, omega, k)
            want = -1.0 * (1.0 + np.sum(df * df, axis=-1))
            np.testing.assert_allclose(chi[:, : path.dim], 0.0, atol=1e-9)
            np.testing.assert_allclose(chi[:, -1], want, rtol=1e-9)

    def test_never_vanishes_on_samples(self):
        rng = np.random.default_rng(11)
        for path in (CIRCLE, CIRCLE_3D, LISS):
            omega = rng.uniform(-4 * np.pi, 4 * np.pi, 10_000)
            q = rng.uniform(-80.0, 80.0, (10_000, path.dim))
            chi = gvf_augmented(path, q, omega, np.full(path.dim, 1.5))
            assert np.min(np.linalg.norm(chi, axis=-1)) > 1e-9

    def test_singularity_contrast_at_center(self):
        for omega in (0.0, 1.0, -3.5):
            chi = gvf_augmented(CIRCLE, [-40.0, 50.0], omega, [1.5, 1.5])
            assert np.linalg.norm(chi) > 1e-9

    def test_gain_validation(self):
        with pytest.raises(ValueError):
            gvf_augmented(CIRCLE, [-28.0, 50.0], 0.0, [1.5, -1.0])
        with pytest.raises(ValueError):
            gvf_augmented(CIRCLE, [-28.0, 50.0], 0.0, [1.5, 1.5], sign=0.5)


class TestDerivativeConsistency:
    @pytest.mark.parametrize("path", [CIRCLE, CIRCLE_3D, LISS], ids=["circle", "circle3d", "liss"])
    def test_partials_match_finite_differences(self, path):
        validate_partials(path)

    def test_broken_partials_detected(self):
        bad = custom_path(
            f=lambda w: np.stack([np.cos(np.asarray(w)), np.sin(np.asarray(w))], axis=-1),
            df=lambda w: np.stack([np.cos(np.asarray(w)), np.cos(np.asarray(w))], axis=-1),
            ddf=lambda w: np.stack([-np.cos(np.asarray(w)), -np.sin(np.asarray(w))], axis=-1),
            dim=2,
        )
        with pytest.raises(ValueError):
            validate_partials(bad)

    @pytest.mark.parametrize("path", [CIRCLE, LISS], ids=["circle", "liss"])
    def test_bounds_are_finite(self, path):
        report = bounds_report(path, (-4 * np.pi, 4 * np.pi))
        assert report["bounded"]
        assert report["sup_df"] > 0.0


class TestDistanceSurrogate:
    @pytest.mark.parametrize("path", [CIRCLE, LISS], ids=["circle", "liss"])
    def test_phi_bounds_distance(self, path):
        # the parametric point f(w) belongs to the path, so the true distance
        # can never exceed |phi|; checked against a dense path sampling
        rng = np.random.default_rng(21)
        period = path.period
        dense = path.f(np.linspace(0.0, period, 4096, endpoint=False))
        for _ in range(100):
            omega = float(rng.uniform(0.0, period))
            q = rng.uniform(-60.0, 60.0, path.dim)
            phi_norm = path_error(path, q, omega).norm
            dist = np.min(np.linalg.norm(dense - q, axis=-1))
            assert dist <= phi_norm + 1e-9
