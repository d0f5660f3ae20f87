"""Scenario configuration: JSON schema, loading, validation, initial states.

A scenario file is a single JSON document::

    {
      "name": "...", "dt": 0.002, "duration": 200.0, "seed": 11,
      "vehicles": [
        {"kind": "usv" | "uav",
         "path": {"kind": "circle", "center": [x, y], "radius": r,
                  "altitude": z}            # altitude only for 3D
               | {"kind": "lissajous", "amplitude": [...], "frequency": [...],
                  "phase": [...], "offset": [...]}
               | {"kind": "custom", "offsets": [...], "terms": [[[amp, freq,
                  phase], ...], ...], "period": p | null},
         "gains": {"k": [...], "c": 2.0},
         "regulator": {"b": [b1, b2, b3, b4], "derivative_pole": 50.0,
                       "surge_floor": 0.05},
         "params": {"eps": [e1..e7]},       # USV only
         "limits": {"tau_u": .., "tau_r": .., "accel": .., "speed": ..},
         "start": {"q": [...], "jitter": [...], "psi": 0.0, "psi_jitter": 0.0,
                   "u": 0.0, "v": 0.0, "r": 0.0, "p": [0,0,0],
                   "omega": 0.0, "omega_jitter": 0.0}},
        ...
      ],
      "topology": {"preset": "ring" | "chain", "weight": 1.0,
                   "delta": scalar | [per-edge], "undirected": true,
                   "period": p | null}
                | {"edges": [[i, k, weight, delta_ik], ...], ...},
      "safety": {"enabled": false, "radius": 1.5, "gamma": 1.0,
                 "usv_pairs": true, "uav_pairs": true, "cross_domain": false},
      "outputs": {"telemetry": "...", "metrics": "..."}
    }

The RNG (``numpy.random.default_rng(seed)``) is consumed in roster order:
position jitter axes, then heading jitter (USV), then omega jitter.  All
``limits`` entries are optional (omitted = unlimited); ``speed`` caps the
norm of the guidance velocity before the regulator sees it.

Validation enforces: a directed spanning tree exists, path dimension
matches the vehicle kind, displacement antisymmetry and cycle consistency,
positive gains, vessel parameter sign constraints, a stable derivative
filter (``pole*dt < 2``), and path partials consistent with finite
differences.
"""

from __future__ import annotations

import importlib.resources
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import network, paths
from .errors import ConfigError, ConnectivityError
from .guidance import GuidanceGains
from .regulator import RegulatorGains
from .safety import SafetyConfig
from .vehicles import UsvParams


@dataclass
class StartSpec:
    q: np.ndarray
    jitter: np.ndarray
    psi: float = 0.0
    psi_jitter: float = 0.0
    u: float = 0.0
    v: float = 0.0
    r: float = 0.0
    p: np.ndarray = None
    omega: float = 0.0
    omega_jitter: float = 0.0


@dataclass
class VehicleSpec:
    kind: str
    path: paths.PathSpec
    gains: GuidanceGains
    reg_gains: RegulatorGains
    derivative_pole: float
    surge_floor: float
    start: StartSpec
    params: Optional[UsvParams] = None
    tau_u_max: float = np.inf
    tau_r_max: float = np.inf
    accel_max: float = np.inf
    speed_cap: float = np.inf

    @property
    def dim(self) -> int:
        return 2 if self.kind == "usv" else 3


@dataclass
class ScenarioConfig:
    name: str
    dt: float
    duration: float
    seed: int
    vehicles: list
    topology: network.Topology
    safety: SafetyConfig
    outputs: dict = field(default_factory=dict)

    @property
    def n_ticks(self) -> int:
        return int(round(self.duration / self.dt)) + 1

    @property
    def usv_indices(self) -> list:
        return [g for g, v in enumerate(self.vehicles) if v.kind == "usv"]

    @property
    def uav_indices(self) -> list:
        return [g for g, v in enumerate(self.vehicles) if v.kind == "uav"]


def bundled_scenario_path(name: str) -> Path:
    """Filesystem path of a scenario shipped with the package."""
    resource = importlib.resources.files("gvfleet") / "scenarios" / f"{name}.json"
    if not resource.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return Path(str(resource))


def load_scenario(source) -> ScenarioConfig:
    """Load and validate a scenario from a path, bundled name, or dict."""
    if isinstance(source, dict):
        doc = source
        name_hint = doc.get("name", "scenario")
    else:
        path = Path(source)
        if not path.exists() and not path.suffix:
            path = bundled_scenario_path(str(source))
        if not path.exists():
            raise ConfigError(f"scenario file not found: {source}")
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise ConfigError(f"scenario file {path} is not valid JSON: {err}") from err
        name_hint = doc.get("name", path.stem)
    try:
        return _parse(doc, name_hint)
    except (KeyError, TypeError, IndexError) as err:
        raise ConfigError(f"malformed scenario {name_hint!r}: {err!r}") from err


def _parse(doc: dict, name: str) -> ScenarioConfig:
    dt = float(doc.get("dt", 0.01))
    duration = float(doc.get("duration", 60.0))
    seed = int(doc.get("seed", 0))
    if dt <= 0.0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if duration < 0.0:
        raise ConfigError(f"duration must be nonnegative, got {duration}")

    vehicles = [_parse_vehicle(v, idx, dt) for idx, v in enumerate(doc["vehicles"])]
    if not vehicles:
        raise ConfigError("scenario has no vehicles")

    topo = _parse_topology(doc.get("topology", {}), len(vehicles))
    if not network.has_spanning_tree(topo.adjacency):
        raise ConnectivityError(
            "communication topology has no directed spanning tree"
        )
    topo.validate()

    saf_doc = dict(doc.get("safety", {}))
    saf_doc.setdefault("radius", 1.0)
    try:
        safety = SafetyConfig(**saf_doc)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad safety block: {err}") from err

    return ScenarioConfig(
        name=str(doc.get("name", name)),
        dt=dt,
        duration=duration,
        seed=seed,
        vehicles=vehicles,
        topology=topo,
        safety=safety,
        outputs=dict(doc.get("outputs", {})),
    )


def _parse_path(doc: dict, kind: str) -> paths.PathSpec:
    pkind = doc.get("kind")
    if pkind == "circle":
        spec = paths.circle_path(doc["center"], float(doc["radius"]),
                                 altitude=doc.get("altitude"))
    elif pkind == "lissajous":
        spec = paths.lissajous_path(doc["amplitude"], doc["frequency"],
                                    doc["phase"], doc["offset"])
    elif pkind == "custom":
        spec = paths.trig_series_path(doc["offsets"], doc["terms"],
                                      period=doc.get("period"))
    else:
        raise ConfigError(f"unknown path kind {pkind!r}")
    want = 2 if kind == "usv" else 3
    if spec.dim != want:
        raise ConfigError(f"{kind} requires a {want}d path, got {spec.dim}d")
    paths.validate_partials(spec)
    return spec


def _parse_vehicle(doc: dict, idx: int, dt: float) -> VehicleSpec:
    kind = doc.get("kind")
    if kind not in ("usv", "uav"):
        raise ConfigError(f"vehicle {idx}: kind must be 'usv' or 'uav', got {kind!r}")
    path = _parse_path(doc["path"], kind)
    dim = path.dim

    gains_doc = doc.get("gains", {})
    k = np.asarray(gains_doc.get("k", [1.5] * dim), dtype=np.float64)
    if k.shape != (dim,):
        raise ConfigError(f"vehicle {idx}: gains.k must have {dim} entries")
    try:
        gains = GuidanceGains(k=k, c=float(gains_doc.get("c", 2.0)))
    except ValueError as err:
        raise ConfigError(f"vehicle {idx}: {err}") from err

    reg_doc = doc.get("regulator", {})
    b = list(reg_doc.get("b", [2.0, 2.0, 2.0, 2.0]))
    if len(b) != 4:
        raise ConfigError(f"vehicle {idx}: regulator.b must have 4 entries")
    try:
        reg_gains = RegulatorGains(*(float(x) for x in b))
    except ValueError as err:
        raise ConfigError(f"vehicle {idx}: {err}") from err
    pole = float(reg_doc.get("derivative_pole", 50.0))
    if not 0.0 < pole * dt < 2.0:
        raise ConfigError(
            f"vehicle {idx}: derivative_pole*dt = {pole * dt:g} outside (0, 2)"
        )
    floor = float(reg_doc.get("surge_floor", 0.05))
    if floor <= 0.0:
        raise ConfigError(f"vehicle {idx}: surge_floor must be positive")

    params = None
    if kind == "usv":
        eps = doc.get("params", {}).get("eps")
        try:
            params = UsvParams(*(float(x) for x in eps)) if eps else UsvParams()
        except (TypeError, ValueError) as err:
            raise ConfigError(f"vehicle {idx}: bad params.eps: {err}") from err

    lim = doc.get("limits", {})

    start_doc = doc.get("start", {})
    q = np.asarray(start_doc.get("q", [0.0] * dim), dtype=np.float64)
    if q.shape != (dim,):
        raise ConfigError(f"vehicle {idx}: start.q must have {dim} entries")
    jitter = np.asarray(start_doc.get("jitter", [0.0] * dim), dtype=np.float64)
    if jitter.shape != (dim,):
        raise ConfigError(f"vehicle {idx}: start.jitter must have {dim} entries")
    start = StartSpec(
        q=q,
        jitter=jitter,
        psi=float(start_doc.get("psi", 0.0)),
        psi_jitter=float(start_doc.get("psi_jitter", 0.0)),
        u=float(start_doc.get("u", 0.0)),
        v=float(start_doc.get("v", 0.0)),
        r=float(start_doc.get("r", 0.0)),
        p=np.asarray(start_doc.get("p", [0.0, 0.0, 0.0]), dtype=np.float64),
        omega=float(start_doc.get("omega", 0.0)),
        omega_jitter=float(start_doc.get("omega_jitter", 0.0)),
    )

    def _limit(key):
        value = lim.get(key)
        return np.inf if value is None else float(value)

    return VehicleSpec(
        kind=kind, path=path, gains=gains, reg_gains=reg_gains,
        derivative_pole=pole, surge_floor=floor, start=start, params=params,
        tau_u_max=_limit("tau_u"), tau_r_max=_limit("tau_r"),
        accel_max=_limit("accel"), speed_cap=_limit("speed"),
    )


def _parse_topology(doc: dict, n: int) -> network.Topology:
    period = doc.get("period")
    period = None if period is None else float(period)
    undirected = bool(doc.get("undirected", True))
    preset = doc.get("preset")
    if preset is not None:
        weight = float(doc.get("weight", 1.0))
        delta = doc.get("delta", 0.0)
        if preset == "ring":
            return network.ring_topology(n, weight=weight, delta=delta,
                                         undirected=undirected, period=period)
        if preset == "chain":
            return network.chain_topology(n, weight=weight, delta=delta,
                                          undirected=undirected, period=period)
        raise ConfigError(f"unknown topology preset {preset!r}")
    edges = doc.get("edges")
    if edges is None:
        raise ConfigError("topology needs either a preset or an edge list")
    norm = []
    for e in edges:
        if len(e) == 2:
            norm.append((e[0], e[1], 1.0, 0.0))
        elif len(e) == 3:
            norm.append((e[0], e[1], e[2], 0.0))
        else:
            norm.append(tuple(e[:4]))
    return network.topology_from_edges(n, norm, undirected=undirected, period=period)


def initial_states(cfg: ScenarioConfig):
    """Seeded initial state arrays, (n_usv, 7) and (n_uav, 7), roster order.

    Jitter is uniform in +-jitter around the nominal start, drawn from one
    generator in roster order, so runs are reproducible from the seed alone.
    """
    rng = np.random.default_rng(cfg.seed)
    usv_rows = []
    uav_rows = []
    for veh in cfg.vehicles:
        st = veh.start
        offsets = np.array([rng.uniform(-j, j) if j > 0.0 else 0.0
                            for j in st.jitter])
        q = st.q + offsets
        if veh.kind == "usv":
            psi = st.psi + (rng.uniform(-st.psi_jitter, st.psi_jitter)
                            if st.psi_jitter > 0.0 else 0.0)
            omega = st.omega + (rng.uniform(-st.omega_jitter, st.omega_jitter)
                                if st.omega_jitter > 0.0 else 0.0)
            usv_rows.append([q[0], q[1], psi, st.u, st.v, st.r, omega])
        else:
            omega = st.omega + (rng.uniform(-st.omega_jitter, st.omega_jitter)
                                if st.omega_jitter > 0.0 else 0.0)
            uav_rows.append([q[0], q[1], q[2], st.p[0], st.p[1], st.p[2], omega])
    usv = np.asarray(usv_rows, dtype=np.float64).reshape(len(usv_rows), 7)
    uav = np.asarray(uav_rows, dtype=np.float64).reshape(len(uav_rows), 7)
    return usv, uav
