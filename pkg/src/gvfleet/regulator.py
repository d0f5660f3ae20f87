"""Lower-level regulators tracking the guidance references.

USV: surge torque and yaw torque.  The surge law cancels the vessel's own
dynamics and adds ``-b1`` feedback on the surge error; the yaw law tracks a
computed yaw-rate reference that in turn regulates sway toward its
reference (feedback linearisation of the sway channel).  Both laws divide
by a reference or measured surge, which is regularised:

* the surge reference is floored at ``+u_floor`` (forward-motion
  convention).  The raw law's surge feedback enters as ``-b1*u*(u - u_r)/u_r``,
  which is *destabilising* whenever ``u`` and ``u_r`` have opposite signs, so
  a vessel asked to reverse would run away instead; flooring the reference
  keeps steerage way and lets the yaw channel bring the field around.
* the measured surge in the yaw-rate reference keeps its sign and is
  floored in magnitude.

With both quantities above the floor the laws reduce exactly to their raw
form.

UAV: acceleration ``-b4 * (p - p_r) + dp_r``, linear in both arguments.

Reference derivatives are not available analytically (they would couple
every vehicle's state through the communication graph), so each regulator
carries first-order-filtered backward-difference estimators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .guidance import GuidanceCommand
from .vehicles import UsvParams, UsvState, UavState

DEFAULT_U_FLOOR = 0.05
DEFAULT_POLE = 50.0


@dataclass
class RegulatorGains:
    """Tracking gains; all strictly positive."""

    b1: float = 2.0
    b2: float = 2.0
    b3: float = 2.0
    b4: float = 2.0

    def __post_init__(self):
        if min(self.b1, self.b2, self.b3, self.b4) <= 0.0:
            raise ValueError("regulator gains must be strictly positive")


@dataclass(frozen=True)
class TrackingErrors:
    """Velocity tracking errors; USV fields or the UAV vector may be unused."""

    u: float = 0.0
    v: float = 0.0
    r: float = 0.0
    p: Optional[np.ndarray] = None

    @classmethod
    def for_usv(cls, state: UsvState, cmd: GuidanceCommand, r_ref: float) -> "TrackingErrors":
        return cls(u=state.u - cmd.velocity[0], v=state.v - cmd.velocity[1],
                   r=state.r - r_ref)

    @classmethod
    def for_uav(cls, state: UavState, cmd: GuidanceCommand) -> "TrackingErrors":
        return cls(p=state.p - cmd.velocity)

    def rotated(self, psi: float) -> np.ndarray:
        """Planar errors rotated into the world frame (consistent rotation)."""
        cp, sp = np.cos(psi), np.sin(psi)
        return np.array([self.u * cp - self.v * sp, self.u * sp + self.v * cp])


class DerivativeFilter:
    """First-order-filtered backward difference: d += pole*dt*(raw - d).

    The first sample only seeds the filter (derivative 0); afterwards the
    output converges to the true derivative of a slowly varying reference
    within about ``5/pole`` seconds.  Requires ``pole*dt < 2`` for stability.
    """

    def __init__(self, pole: float = DEFAULT_POLE):
        if pole <= 0.0:
            raise ValueError("filter pole must be positive")
        self.pole = pole
        self._prev: Optional[float] = None
        self._value = 0.0

    def update(self, sample: float, dt: float) -> float:
        if not dt > 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        if self._prev is None:
            self._prev = sample
            return self._value
        raw = (sample - self._prev) / dt
        self._value += self.pole * dt * (raw - self._value)
        self._prev = sample
        return self._value

    def reset(self) -> None:
        self._prev = None
        self._value = 0.0


def floor_reference(x: float, floor: float) -> float:
    """Forward-motion floor: ``max(x, floor)``."""
    return x if x >= floor else floor


def floor_magnitude(x: float, floor: float) -> float:
    """Sign-preserving magnitude floor (zero maps to ``+floor``)."""
    if x >= 0.0:
        return x if x >= floor else floor
    return x if x <= -floor else -floor


@dataclass(frozen=True)
class UsvControl:
    tau_u: float
    tau_r: float
    yaw_rate_ref: float
    floor_active: bool


def usv_yaw_rate_ref(state: UsvState, cmd: GuidanceCommand, dv_ref: float,
                     params: UsvParams, gains: RegulatorGains,
                     u_floor: float = DEFAULT_U_FLOOR) -> float:
    """Yaw-rate reference that drives sway toward its guidance value."""
    v_err = state.v - cmd.velocity[1]
    u_div = floor_magnitude(state.u, u_floor)
    return (-params.eps6 * state.v + dv_ref - gains.b3 * v_err) / (params.eps7 * u_div)


def usv_control(state: UsvState, params: UsvParams, cmd: GuidanceCommand,
                derivs, gains: RegulatorGains,
                u_floor: float = DEFAULT_U_FLOOR) -> UsvControl:
    """Surge and yaw torques for one tick.

    ``derivs = (du_ref, dv_ref, dr_ref)`` are the filtered derivatives of
    the (floored) surge reference, the sway reference and the yaw-rate
    reference.  NaN anywhere is rejected.
    """
    du_ref, dv_ref, dr_ref = derivs
    values = (state.to_array(), cmd.velocity, du_ref, dv_ref, dr_ref)
    if not all(np.all(np.isfinite(v)) for v in values):
        raise ValueError("usv_control: non-finite input")
    u_ref = floor_reference(cmd.velocity[0], u_floor)
    r_ref = usv_yaw_rate_ref(state, cmd, dv_ref, params, gains, u_floor)
    u_err = state.u - u_ref
    r_err = state.r - r_ref
    tau_u = (du_ref * state.u - params.eps1 * u_ref * state.u
             - params.eps2 * u_ref * state.v * state.r
             - gains.b1 * state.u * u_err) / (params.eps3 * u_ref)
    tau_r = (-params.eps4 * state.r - gains.b2 * r_err + dr_ref) / params.eps5
    floor_active = cmd.velocity[0] < u_floor or abs(state.u) < u_floor
    return UsvControl(tau_u=float(tau_u), tau_r=float(tau_r),
                      yaw_rate_ref=float(r_ref), floor_active=floor_active)


def uav_control(state: UavState, cmd: GuidanceCommand, dp_ref, b4: float) -> np.ndarray:
    """Acceleration ``-b4 * (p - p_r) + dp_r``, componentwise."""
    dp_ref = np.asarray(dp_ref, dtype=np.float64)
    return -b4 * (state.p - cmd.velocity) + dp_ref


class UsvRegulator:
    """Stateful per-vessel regulator: derivative filters plus the torque laws."""

    def __init__(self, params: UsvParams, gains: RegulatorGains = None,
                 u_floor: float = DEFAULT_U_FLOOR, pole: float = DEFAULT_POLE,
                 tau_u_max: float = np.inf, tau_r_max: float = np.inf):
        self.params = params
        self.gains = gains or RegulatorGains()
        self.u_floor = u_floor
        self.tau_u_max = tau_u_max
        self.tau_r_max = tau_r_max
        self._du = DerivativeFilter(pole)
        self._dv = DerivativeFilter(pole)
        self._dr = DerivativeFilter(pole)

    def step(self, state: UsvState, cmd: GuidanceCommand, dt: float) -> UsvControl:
        du_ref = self._du.update(floor_reference(cmd.velocity[0], self.u_floor), dt)
        dv_ref = self._dv.update(cmd.velocity[1], dt)
        r_ref = usv_yaw_rate_ref(state, cmd, dv_ref, self.params, self.gains, self.u_floor)
        dr_ref = self._dr.update(r_ref, dt)
        ctrl = usv_control(state, self.params, cmd, (du_ref, dv_ref, dr_ref),
                           self.gains, self.u_floor)
        return UsvControl(
            tau_u=float(np.clip(ctrl.tau_u, -self.tau_u_max, self.tau_u_max)),
            tau_r=float(np.clip(ctrl.tau_r, -self.tau_r_max, self.tau_r_max)),
            yaw_rate_ref=ctrl.yaw_rate_ref,
            floor_active=ctrl.floor_active,
        )


class UavRegulator:
    """Stateful per-UAV regulator: one derivative filter per velocity axis."""

    def __init__(self, gains: RegulatorGains = None, pole: float = DEFAULT_POLE,
                 accel_max: float = np.inf):
        self.gains = gains or RegulatorGains()
        self.accel_max = accel_max
        self._dp = [DerivativeFilter(pole) for _ in range(3)]

    def step(self, state: UavState, cmd: GuidanceCommand, dt: float) -> np.ndarray:
        dp_ref = np.array([f.update(float(s), dt) for f, s in zip(self._dp, cmd.velocity)])
        accel = uav_control(state, cmd, dp_ref, self.gains.b4)
        return np.clip(accel, -self.accel_max, self.accel_max)
