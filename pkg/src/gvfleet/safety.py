"""Barrier-based velocity filtering for pairwise separation.

Each nearby same-domain pair contributes one linear constraint on the
vehicle's commanded velocity.  With ``h = ||q_i - q_k||^2 - R^2`` the filter
enforces ``dh/dt >= -gamma * h`` treating the neighbour's velocity as
measured, which gives

    2 (q_i - q_k) . u  >=  -gamma * h + 2 (q_i - q_k) . v_k.

The filtered velocity is the closest point to the nominal command inside
all half-spaces, found by enumerating candidate active sets (at most
``dim`` constraints are active at the optimum of a feasible instance).
Filtering happens on inertial velocities, so the same code serves vessels
(2D) and aerial vehicles (3D).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DegenerateGeometryError, QpInfeasibleError

ACTIVATION_FACTOR = 3.0  # constraints built only within this multiple of R
COINCIDENT_EPS = 1e-9
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class SafetyConfig:
    """Safe radius R (m), class-K gain gamma (1/s) and per-domain switches."""

    radius: float = 1.0
    gamma: float = 1.0
    enabled: bool = False
    usv_pairs: bool = True
    uav_pairs: bool = True
    cross_domain: bool = False

    def __post_init__(self):
        if self.radius <= 0.0 or self.gamma <= 0.0:
            raise ValueError("safety radius and gamma must be positive")


@dataclass(frozen=True)
class BarrierConstraint:
    """Half-space ``normal . u >= bound``; ``barrier`` is the h value."""

    normal: np.ndarray
    bound: float
    barrier: float


def build_constraints(q, neighbor_q, neighbor_v, cfg: SafetyConfig) -> list:
    """Constraints against each neighbour closer than the activation radius.

    ``neighbor_q``/``neighbor_v`` are ``(m, dim)`` arrays of the other
    vehicles' positions and (last broadcast) velocities.
    """
    q = np.asarray(q, dtype=np.float64)
    neighbor_q = np.atleast_2d(np.asarray(neighbor_q, dtype=np.float64))
    neighbor_v = np.atleast_2d(np.asarray(neighbor_v, dtype=np.float64))
    constraints = []
    for qk, vk in zip(neighbor_q, neighbor_v):
        rel = q - qk
        dist = float(np.linalg.norm(rel))
        if dist < COINCIDENT_EPS:
            raise DegenerateGeometryError(
                f"coincident vehicles (separation {dist:.3e} m)"
            )
        if dist >= ACTIVATION_FACTOR * cfg.radius:
            continue
        h = dist * dist - cfg.radius**2
        normal = 2.0 * rel
        bound = -cfg.gamma * h + float(normal @ vk)
        constraints.append(BarrierConstraint(normal=normal, bound=bound, barrier=h))
    return constraints


def qp_filter(u_nominal, constraints) -> np.ndarray:
    """Minimally modified velocity satisfying every barrier constraint.

    Solves ``min ||u - u_nominal||^2  s.t.  a_s . u >= b_s`` exactly by
    checking the unconstrained point and then every candidate active subset
    of size up to ``dim`` (KKT: ``u = u_nominal + A_S^T lam``, ``lam >= 0``).
    """
    u_nominal = np.asarray(u_nominal, dtype=np.float64)
    if not constraints:
        return u_nominal.copy()
    dim = u_nominal.shape[0]
    a_mat = np.array([c.normal for c in constraints])
    b_vec = np.array([c.bound for c in constraints])

    def feasible(u):
        return np.all(a_mat @ u >= b_vec - SLACK_TOL)

    if feasible(u_nominal):
        return u_nominal.copy()

    best = None
    best_obj = np.inf
    m = len(constraints)
    for size in range(1, min(dim, m) + 1):
        for subset in combinations(range(m), size):
            a_s = a_mat[list(subset)]
            gram = a_s @ a_s.T
            try:
                lam = np.linalg.solve(gram, b_vec[list(subset)] - a_s @ u_nominal)
            except np.linalg.LinAlgError:
                continue
            if np.any(lam < -1e-12):
                continue
            u = u_nominal + a_s.T @ lam
            if not feasible(u):
                continue
            obj = float(np.sum((u - u_nominal) ** 2))
            if obj < best_obj:
                best_obj = obj
                best = u
    if best is None:
        raise QpInfeasibleError(
            f"no feasible velocity for {m} barrier constraints in {dim}d"
        )
    return best
