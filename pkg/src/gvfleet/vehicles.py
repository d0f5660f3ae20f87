"""Vehicle models and fixed-step integration.

Surface vessel (USV), planar 3-DOF.  State is
``[q_x, q_y, psi, u, v, r, omega]``:

* ``q`` world position (m), ``psi`` heading (rad, unwrapped)
* ``u, v, r`` surge, sway, yaw velocities in the body frame (m/s, m/s, rad/s)
* ``omega`` the virtual path coordinate (dimensionless)

Kinematics rotate ``(u, v)`` into the world frame by ``psi``; the velocity
dynamics are linear-plus-product with coefficients ``eps1..eps7``
(identified per vessel, supplied by configuration):

    du = eps1*u + eps2*v*r + eps3*tau_u
    dr = eps4*r + eps5*tau_r
    dv = eps6*v + eps7*u*r

Aerial vehicle (UAV), a 3D double integrator with acceleration input.
State is ``[q_x, q_y, q_z, p_x, p_y, p_z, omega]``.

Integration is classical fixed-step RK4 with inputs held constant over the
step (the controllers run at the tick rate, so this is the sampled-data
closed loop, not an approximation of a faster one).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

USV_STATE_DIM = 7
UAV_STATE_DIM = 7


@dataclass
class UsvParams:
    """Coefficients of the vessel velocity dynamics.

    ``eps1, eps4, eps6`` must be negative (open-loop damping in each axis);
    ``eps3, eps5, eps7`` must be nonzero (actuator and sway-coupling gains).
    Note the lower-level yaw law stabilises heading-to-field alignment only
    when ``eps6/eps7 < 0``; see the scenario documentation.
    """

    eps1: float = -0.5
    eps2: float = 0.1
    eps3: float = 0.5
    eps4: float = -0.8
    eps5: float = 0.8
    eps6: float = -0.9
    eps7: float = 0.3

    def __post_init__(self):
        if self.eps3 == 0.0 or self.eps5 == 0.0 or self.eps7 == 0.0:
            raise ValueError("eps3, eps5, eps7 must be nonzero")
        if self.eps1 >= 0.0 or self.eps4 >= 0.0 or self.eps6 >= 0.0:
            raise ValueError("eps1, eps4, eps6 must be negative (open-loop damping)")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.eps1, self.eps2, self.eps3, self.eps4, self.eps5, self.eps6, self.eps7]
        )


@dataclass
class UsvState:
    q: np.ndarray
    psi: float
    u: float
    v: float
    r: float
    omega: float

    def to_array(self) -> np.ndarray:
        return np.array([self.q[0], self.q[1], self.psi, self.u, self.v, self.r, self.omega])

    @classmethod
    def from_array(cls, y) -> "UsvState":
        y = np.asarray(y, dtype=np.float64)
        return cls(q=y[:2].copy(), psi=float(y[2]), u=float(y[3]), v=float(y[4]),
                   r=float(y[5]), omega=float(y[6]))


@dataclass
class UavState:
    q: np.ndarray
    p: np.ndarray
    omega: float

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p, [self.omega]])

    @classmethod
    def from_array(cls, y) -> "UavState":
        y = np.asarray(y, dtype=np.float64)
        return cls(q=y[:3].copy(), p=y[3:6].copy(), omega=float(y[6]))


def _check_finite(name, *values):
    for val in values:
        if not np.all(np.isfinite(val)):
            raise ValueError(f"{name}: non-finite input")


def usv_derivative(state: UsvState, params: UsvParams, tau, u_omega: float) -> np.ndarray:
    """Time derivative of the USV state array under actuator pair ``tau``."""
    tau_u, tau_r = tau
    _check_finite("usv_derivative", state.to_array(), tau_u, tau_r, u_omega)
    cp, sp = np.cos(state.psi), np.sin(state.psi)
    return np.array([
        state.u * cp - state.v * sp,
        state.u * sp + state.v * cp,
        state.r,
        params.eps1 * state.u + params.eps2 * state.v * state.r + params.eps3 * tau_u,
        params.eps6 * state.v + params.eps7 * state.u * state.r,
        params.eps4 * state.r + params.eps5 * tau_r,
        u_omega,
    ])


def uav_derivative(state: UavState, accel, u_omega: float) -> np.ndarray:
    """Time derivative of the UAV state array under acceleration ``accel``."""
    accel = np.asarray(accel, dtype=np.float64)
    _check_finite("uav_derivative", state.to_array(), accel, u_omega)
    return np.concatenate([state.p, accel, [u_omega]])


def integrate_step(deriv, y, dt: float) -> np.ndarray:
    """One classical RK4 step of ``y' = deriv(y)``; deterministic."""
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    y = np.asarray(y, dtype=np.float64)
    k1 = deriv(y)
    k2 = deriv(y + 0.5 * dt * k1)
    k3 = deriv(y + 0.5 * dt * k2)
    k4 = deriv(y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def usv_step(state: UsvState, params: UsvParams, tau, u_omega: float, dt: float) -> UsvState:
    """Advance a USV by one tick with the actuator inputs held constant."""
    def deriv(y):
        return usv_derivative(UsvState.from_array(y), params, tau, u_omega)
    return UsvState.from_array(integrate_step(deriv, state.to_array(), dt))


def uav_step(state: UavState, accel, u_omega: float, dt: float) -> UavState:
    """Advance a UAV by one tick with the acceleration held constant."""
    def deriv(y):
        return uav_derivative(UavState.from_array(y), accel, u_omega)
    return UavState.from_array(integrate_step(deriv, state.to_array(), dt))
