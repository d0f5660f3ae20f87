"""Closed-loop orchestration, metrics, and the energy diagnostic.

``run_scenario`` packs a validated configuration into flat arrays and hands
the whole run to the fused tick loop (see :mod:`gvfleet.kernels`).  Update
order within a tick: exchange -> guidance -> barrier filter -> regulator,
then the telemetry row is written (state at the tick together with the
commands computed from it) and RK4 advances the state with the commands
held constant across the substages (sampled-data loop).  Runs are
deterministic: same config and seed give byte-identical telemetry.

``compute_metrics`` reduces a telemetry object (in-memory or re-read from
CSV; both give bit-identical results) to the convergence and coordination
summary used by the acceptance suite.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import ConfigError, SimulationAbort, UnsupportedTopologyError
from .network import Topology
from .scenario import ScenarioConfig, initial_states
from .telemetry import Telemetry

_ABORT_REASONS = {
    kernels.STATUS_QP_INFEASIBLE: "safety QP infeasible",
    kernels.STATUS_NONFINITE: "non-finite vehicle state (divergence guard)",
    kernels.STATUS_DEGENERATE: "coincident vehicles (degenerate barrier geometry)",
}


def reference_coordinates(cfg: ScenarioConfig, omega0_anchor: float) -> np.ndarray:
    """Per-vehicle reference coordinates at t=0, anchored at vehicle 0.

    The reference moves at rate -1 and holds the configured displacements:
    ``omega*_g(t) = theta_g + (omega_0(0) - theta_0) - t`` with theta the
    displacement potentials accumulated along a BFS tree.
    """
    theta = cfg.topology.delta_potentials()
    return theta + (omega0_anchor - theta[0])


def _pack_paths(specs, dim):
    n = len(specs)
    n_terms = max([s.path.terms.shape[1] for s in specs], default=1)
    off = np.zeros((n, dim))
    terms = np.zeros((n, dim, max(n_terms, 1), 3))
    for i, s in enumerate(specs):
        off[i] = s.path.offsets
        terms[i, :, : s.path.terms.shape[1], :] = s.path.terms
    return off, terms


def run_scenario(cfg: ScenarioConfig, backend: Optional[str] = None) -> Telemetry:
    """Simulate the full closed loop; returns dense telemetry.

    Raises :class:`SimulationAbort` (with partial telemetry attached) if the
    safety QP turns infeasible, geometry degenerates, or a state diverges.
    """
    for g, veh in enumerate(cfg.vehicles):
        if not veh.path.has_table:
            raise ConfigError(
                f"vehicle {g}: closure-backed custom paths cannot run in the "
                "fused simulator; use a cosine-series table"
            )
    usv_state, uav_state = initial_states(cfg)
    usvs = [cfg.vehicles[g] for g in cfg.usv_indices]
    uavs = [cfg.vehicles[g] for g in cfg.uav_indices]
    n, m = len(usvs), len(uavs)
    big = n + m
    n_ticks = cfg.n_ticks

    usv_gidx = np.asarray(cfg.usv_indices, dtype=np.int64)
    uav_gidx = np.asarray(cfg.uav_indices, dtype=np.int64)
    usv_eps = np.zeros((n, 7))
    usv_k = np.zeros((n, 2))
    usv_b = np.zeros((n, 3))
    usv_lamf = np.zeros(n)
    usv_floor = np.zeros(n)
    usv_tau_max = np.zeros((n, 2))
    usv_speed = np.zeros(n)
    for i, veh in enumerate(usvs):
        usv_eps[i] = veh.params.as_array()
        usv_k[i] = veh.gains.k
        usv_b[i] = (veh.reg_gains.b1, veh.reg_gains.b2, veh.reg_gains.b3)
        usv_lamf[i] = veh.derivative_pole
        usv_floor[i] = veh.surge_floor
        usv_tau_max[i] = (veh.tau_u_max, veh.tau_r_max)
        usv_speed[i] = veh.speed_cap
    usv_off, usv_terms = _pack_paths(usvs, 2)

    uav_k = np.zeros((m, 3))
    uav_b4 = np.zeros(m)
    uav_lamf = np.zeros(m)
    uav_acc = np.zeros(m)
    uav_speed = np.zeros(m)
    for j, veh in enumerate(uavs):
        uav_k[j] = veh.gains.k
        uav_b4[j] = veh.reg_gains.b4
        uav_lamf[j] = veh.derivative_pole
        uav_acc[j] = veh.accel_max
        uav_speed[j] = veh.speed_cap
    uav_off, uav_terms = _pack_paths(uavs, 3)

    c_all = np.array([veh.gains.c for veh in cfg.vehicles])
    anchor = usv_state[0, 6] if cfg.vehicles[0].kind == "usv" else uav_state[0, 6]
    omega_star0 = reference_coordinates(cfg, float(anchor))
    lyap_on = 1 if cfg.topology.is_undirected else 0

    saf = cfg.safety
    out = np.empty((n_ticks, big, kernels.N_FIELDS))
    out_v = np.empty(n_ticks)
    abort_info = np.zeros(2, dtype=np.int64)

    loop = kernels.get_loop(backend)
    status = loop(
        float(cfg.dt), int(n_ticks),
        usv_gidx, usv_state, usv_eps, usv_k, usv_b, usv_lamf, usv_floor,
        usv_tau_max, usv_speed, usv_off, usv_terms,
        uav_gidx, uav_state, uav_k, uav_b4, uav_lamf,
        uav_acc, uav_speed, uav_off, uav_terms,
        c_all, cfg.topology.adjacency, cfg.topology.delta,
        lyap_on, omega_star0, cfg.topology.laplacian,
        1 if saf.enabled else 0, 1 if saf.usv_pairs else 0,
        1 if saf.uav_pairs else 0, 1 if saf.cross_domain else 0,
        float(saf.radius), float(saf.gamma),
        out, out_v, abort_info,
    )

    kinds = tuple(veh.kind for veh in cfg.vehicles)
    if status != kernels.STATUS_OK:
        tick = int(abort_info[0])
        reason = _ABORT_REASONS.get(status, f"kernel status {status}")
        partial = Telemetry(dt=cfg.dt, kinds=kinds, data=out[:tick].copy(),
                            lyapunov=out_v[:tick].copy(), aborted=True,
                            abort_reason=reason)
        raise SimulationAbort(
            f"run aborted at t={tick * cfg.dt:.3f}s (vehicle {int(abort_info[1])}): {reason}",
            telemetry=partial, tick=tick,
        )
    return Telemetry(dt=cfg.dt, kinds=kinds, data=out, lyapunov=out_v)


def lyapunov_value(path_errors, gains, omega, omega_ref, topology: Topology) -> float:
    """Energy ``0.5*(sum_g phi_g' K_g phi_g + wt' C L wt)``, wt = omega - omega_ref.

    Only defined for undirected topologies, where the quadratic coordinate
    term is a true (positive semidefinite) energy.
    """
    if not topology.is_undirected:
        raise UnsupportedTopologyError(
            "energy diagnostic requires an undirected topology"
        )
    omega = np.asarray(omega, dtype=np.float64)
    omega_ref = np.asarray(omega_ref, dtype=np.float64)
    quad = 0.0
    c = np.empty(topology.n_total)
    for g, (phi, gain) in enumerate(zip(path_errors, gains)):
        phi = np.asarray(phi, dtype=np.float64)
        quad += float(np.sum(gain.k * phi * phi))
        c[g] = gain.c
    wt = omega - omega_ref
    quad += float(wt @ (c * (topology.laplacian @ wt)))
    return 0.5 * quad


@dataclass
class MetricsSummary:
    """Run-level reductions; every field derives from telemetry alone."""

    dt: float
    duration: float
    n_vehicles: int
    phi_threshold: float
    residual_threshold: float
    final_phi: list
    max_phi: float
    max_phi_usv: Optional[float]
    max_phi_uav: Optional[float]
    time_to_phi_threshold: list
    time_to_phi_threshold_fleet: Optional[float]
    residual_final_max: Optional[float]
    time_to_residual_threshold: Optional[float]
    omega_rate_mean: list
    omega_rate_std: list
    min_distance_usv: Optional[float]
    min_distance_uav: Optional[float]
    max_abs_omega_err: Optional[float]
    lyapunov_peak: Optional[float]
    lyapunov_final: Optional[float]

    def to_dict(self) -> dict:
        return asdict(self)


def _sustained_threshold_time(times, series, threshold) -> Optional[float]:
    """Earliest time from which the series stays strictly below threshold."""
    below = series < threshold
    if not below[-1]:
        return None
    idx = len(below) - 1
    while idx > 0 and below[idx - 1]:
        idx -= 1
    return float(times[idx])


def _min_pairwise(tel: Telemetry, indices, planar: bool) -> Optional[float]:
    if len(indices) < 2:
        return None
    axes = ["q_x", "q_y"] if planar else ["q_x", "q_y", "q_z"]
    coords = np.stack([tel.column(a)[:, indices] for a in axes], axis=-1)
    best = np.inf
    for a in range(len(indices)):
        for b in range(a + 1, len(indices)):
            d = np.sqrt(np.sum((coords[:, a, :] - coords[:, b, :]) ** 2, axis=-1))
            best = min(best, float(np.min(d)))
    return best


def compute_metrics(tel: Telemetry, phi_threshold: float = 0.1,
                    residual_threshold: float = 0.05) -> MetricsSummary:
    """Convergence/coordination summary; reproducible bit-for-bit from CSV."""
    if tel.n_ticks == 0:
        raise ValueError("empty telemetry")
    times = tel.times
    usv_idx = [g for g, k in enumerate(tel.kinds) if k == "usv"]
    uav_idx = [g for g, k in enumerate(tel.kinds) if k == "uav"]

    phi = np.sqrt(np.nansum(np.stack([
        tel.column("phi_x") ** 2,
        tel.column("phi_y") ** 2,
        np.nan_to_num(tel.column("phi_z")) ** 2,
    ]), axis=0))
    final_phi = [float(x) for x in phi[-1]]
    max_phi = float(np.max(phi))
    max_phi_usv = float(np.max(phi[:, usv_idx])) if usv_idx else None
    max_phi_uav = float(np.max(phi[:, uav_idx])) if uav_idx else None

    t2p = [_sustained_threshold_time(times, phi[:, g], phi_threshold)
           for g in range(tel.n_vehicles)]
    fleet_phi = np.max(phi, axis=1)
    t2p_fleet = _sustained_threshold_time(times, fleet_phi, phi_threshold)

    res = tel.column("residual_max")
    if np.all(np.isnan(res)):
        res_final = None
        t2r = None
    else:
        fleet_res = np.nanmax(res, axis=1)
        res_final = float(fleet_res[-1])
        t2r = _sustained_threshold_time(times, fleet_res, residual_threshold)

    omega = tel.column("omega")
    if tel.n_ticks >= 2:
        rate = np.diff(omega, axis=0) / tel.dt
        start = int(np.floor(0.8 * rate.shape[0]))
        tail = rate[start:]
        rate_mean = [float(x) for x in tail.mean(axis=0)]
        rate_std = [float(x) for x in tail.std(axis=0)]
    else:
        rate_mean = []
        rate_std = []

    werr = tel.column("omega_err")
    max_werr = None if np.all(np.isnan(werr)) else float(np.nanmax(np.abs(werr)))

    lyap = tel.lyapunov
    if np.all(np.isnan(lyap)):
        lyap_peak = None
        lyap_final = None
    else:
        lyap_peak = float(np.nanmax(lyap))
        lyap_final = float(lyap[-1])

    return MetricsSummary(
        dt=float(tel.dt),
        duration=float(times[-1]),
        n_vehicles=tel.n_vehicles,
        phi_threshold=phi_threshold,
        residual_threshold=residual_threshold,
        final_phi=final_phi,
        max_phi=max_phi,
        max_phi_usv=max_phi_usv,
        max_phi_uav=max_phi_uav,
        time_to_phi_threshold=t2p,
        time_to_phi_threshold_fleet=t2p_fleet,
        residual_final_max=res_final,
        time_to_residual_threshold=t2r,
        omega_rate_mean=rate_mean,
        omega_rate_std=rate_std,
        min_distance_usv=_min_pairwise(tel, usv_idx, planar=True),
        min_distance_uav=_min_pairwise(tel, uav_idx, planar=False),
        max_abs_omega_err=max_werr,
        lyapunov_peak=lyap_peak,
        lyapunov_final=lyap_final,
    )
