"""Barrier constraints and the velocity-projection QP."""

import numpy as np
import pytest

from gvfleet import (
    BarrierConstraint,
    DegenerateGeometryError,
    QpInfeasibleError,
    SafetyConfig,
    build_constraints,
    qp_filter,
)
from gvfleet.acceptance import _face_oracle

CFG = SafetyConfig(radius=2.0, gamma=1.0, enabled=True)


class TestBuildConstraints:
    def test_far_neighbor_ignored(self):
        cons = build_constraints(np.zeros(2), [[7.0, 0.0]], [[0.0, 0.0]], CFG)
        assert cons == []

    def test_neighbor_at_safe_radius(self):
        cons = build_constraints(np.zeros(2), [[2.0, 0.0]], [[0.0, 0.0]], CFG)
        assert len(cons) == 1
        assert cons[0].bound == pytest.approx(0.0)
        assert cons[0].barrier == pytest.approx(0.0)
        # normal points from the neighbour toward the vehicle
        np.testing.assert_allclose(cons[0].normal, [-4.0, 0.0])

    def test_two_neighbors_hand_evaluated(self):
        q = np.array([1.0, 2.0, 3.0])
        nbr_q = np.array([[2.0, 2.0, 3.0], [1.0, -0.5, 3.5]])
        nbr_v = np.array([[0.5, 0.0, 0.0], [0.0, 1.0, -1.0]])
        cons = build_constraints(q, nbr_q, nbr_v, CFG)
        assert len(cons) == 2
        for c, qk, vk in zip(cons, nbr_q, nbr_v):
            rel = q - qk
            h = float(rel @ rel) - CFG.radius**2
            np.testing.assert_allclose(c.normal, 2.0 * rel, atol=1e-14)
            assert c.barrier == pytest.approx(h)
            assert c.bound == pytest.approx(-CFG.gamma * h + 2.0 * rel @ vk)

    def test_coincident_positions_rejected(self):
        with pytest.raises(DegenerateGeometryError):
            build_constraints(np.zeros(2), [[0.0, 1e-12]], [[0.0, 0.0]], CFG)

    def test_cfg_validation(self):
        with pytest.raises(ValueError):
            SafetyConfig(radius=0.0)
        with pytest.raises(ValueError):
            SafetyConfig(radius=1.0, gamma=-1.0)


class TestQpFilter:
    def test_interior_nominal_unchanged(self):
        cons = [BarrierConstraint(np.array([1.0, 0.0]), -5.0, 1.0)]
        u = qp_filter(np.array([1.0, 2.0]), cons)
        np.testing.assert_array_equal(u, [1.0, 2.0])

    def test_no_constraints(self):
        np.testing.assert_array_equal(qp_filter(np.array([1.0, -1.0]), []), [1.0, -1.0])

    def test_single_halfspace_projection(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            dim = int(rng.integers(2, 4))
            a = rng.normal(size=dim)
            u_nom = rng.normal(size=dim)
            b = float(a @ u_nom + rng.uniform(0.5, 2.0))  # violated
            u = qp_filter(u_nom, [BarrierConstraint(a, b, 0.0)])
            expected = u_nom + (b - a @ u_nom) / (a @ a) * a
            np.testing.assert_allclose(u, expected, rtol=1e-12, atol=1e-12)

    def test_random_instances_against_face_oracle(self):
        rng = np.random.default_rng(55)
        for _ in range(300):
            dim = int(rng.integers(2, 4))
            m = int(rng.integers(1, 4))
            u_nom = rng.normal(0.0, 3.0, dim)
            a_mat = rng.normal(0.0, 2.0, (m, dim))
            witness = rng.normal(0.0, 2.0, dim)
            b_vec = a_mat @ witness - rng.uniform(0.0, 2.0, m)
            cons = [BarrierConstraint(a_mat[s], float(b_vec[s]), 0.0)
                    for s in range(m)]
            u = qp_filter(u_nom, cons)
            assert np.min(a_mat @ u - b_vec) >= -1e-9
            oracle = _face_oracle(u_nom, a_mat, b_vec)
            assert float(np.sum((u - u_nom) ** 2)) == pytest.approx(oracle, abs=1e-9)

    def test_minimality_against_random_feasible_points(self):
        rng = np.random.default_rng(66)
        for _ in range(20):
            dim = int(rng.integers(2, 4))
            m = int(rng.integers(1, 4))
            u_nom = rng.normal(0.0, 3.0, dim)
            a_mat = rng.normal(0.0, 2.0, (m, dim))
            witness = rng.normal(0.0, 2.0, dim)
            b_vec = a_mat @ witness - rng.uniform(0.0, 2.0, m)
            cons = [BarrierConstraint(a_mat[s], float(b_vec[s]), 0.0)
                    for s in range(m)]
            u = qp_filter(u_nom, cons)
            qp_dist = np.linalg.norm(u - u_nom)
            pts = witness + rng.normal(0.0, 4.0, (10_000, dim))
            feas = np.all(pts @ a_mat.T >= b_vec, axis=1)
            if np.any(feas):
                best = np.min(np.linalg.norm(pts[feas] - u_nom, axis=1))
                assert qp_dist <= best + 1e-9

    def test_infeasible_raises(self):
        a = np.array([1.0, 0.0])
        cons = [BarrierConstraint(a, 1.0, 0.0), BarrierConstraint(-a, 1.0, 0.0)]
        with pytest.raises(QpInfeasibleError):
            qp_filter(np.zeros(2), cons)
