"""Upper-level guidance: desired velocities and the virtual-coordinate rate.

Both vehicle kinds are steered by the same augmented guiding field with
sign -1: the spatial part ``e = -df - k*phi`` and the coordinate rate
``u_omega = -1 + sum_j k_j phi_j df_j + consensus``.  For the surface vessel
the spatial part is rotated into the body frame (surge/sway references);
the aerial vehicle takes it directly as an inertial velocity reference.

These functions are pure and implement the laws verbatim; reference shaping
used by scenarios (speed caps, surge floors) lives in the simulator and the
regulator, not here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import CoordinateView, consensus_term
from .paths import PathError

FIELD_SIGN = -1.0


@dataclass(frozen=True)
class GuidanceGains:
    """Per-vehicle field gains ``k`` (one per axis) and consensus gain ``c``."""

    k: np.ndarray
    c: float

    def __post_init__(self):
        object.__setattr__(self, "k", np.asarray(self.k, dtype=np.float64))
        if np.any(self.k <= 0.0) or self.c <= 0.0:
            raise ValueError("guidance gains must be strictly positive")


@dataclass(frozen=True)
class GuidanceCommand:
    """Desired velocities plus the virtual-coordinate rate ``u_omega``.

    ``velocity`` is body-frame ``(u_r, v_r)`` for a USV and inertial
    ``(p_rx, p_ry, p_rz)`` for a UAV.
    """

    velocity: np.ndarray
    coordinate_rate: float


def inertial_field(error: PathError, df, gains: GuidanceGains) -> np.ndarray:
    """Spatial field components ``-df - k*phi`` (workspace frame)."""
    return FIELD_SIGN * np.asarray(df, dtype=np.float64) - gains.k * error.phi


def coordinate_rate(error: PathError, df, view: CoordinateView,
                    gains: GuidanceGains) -> float:
    """``-1 + sum_j k_j phi_j df_j`` plus the consensus feedback."""
    df = np.asarray(df, dtype=np.float64)
    return (FIELD_SIGN + float(np.sum(gains.k * error.phi * df))
            + consensus_term(view, gains.c))


def usv_guidance(psi: float, error: PathError, df, view: CoordinateView,
                 gains: GuidanceGains) -> GuidanceCommand:
    """Body-frame surge/sway references and coordinate rate for a vessel."""
    e = inertial_field(error, df, gains)
    cp, sp = np.cos(psi), np.sin(psi)
    u_r = e[0] * cp + e[1] * sp
    v_r = -e[0] * sp + e[1] * cp
    return GuidanceCommand(
        velocity=np.array([u_r, v_r]),
        coordinate_rate=coordinate_rate(error, df, view, gains),
    )


def uav_guidance(error: PathError, df, view: CoordinateView,
                 gains: GuidanceGains) -> GuidanceCommand:
    """Inertial velocity reference and coordinate rate for an aerial vehicle."""
    return GuidanceCommand(
        velocity=inertial_field(error, df, gains),
        coordinate_rate=coordinate_rate(error, df, view, gains),
    )


def desired_coordinate_rate() -> float:
    """The steady coordinate rate shared by both domains: exactly -1."""
    return FIELD_SIGN
