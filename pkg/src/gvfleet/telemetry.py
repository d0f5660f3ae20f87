"""Telemetry container and its CSV round trip.

One row per tick per vehicle, fixed column order, header mandatory.  Floats
are written with ``repr`` so parsing the file back reproduces the in-memory
values bit for bit; fields that do not apply to a vehicle kind (e.g. heading
for an aerial vehicle) are empty and read back as NaN.  The global energy
diagnostic is repeated on every row of its tick.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

FIELDS = (
    "q_x", "q_y", "q_z", "psi", "u", "v", "r", "p_x", "p_y", "p_z", "omega",
    "phi_x", "phi_y", "phi_z", "cmd_u", "cmd_v", "cmd_px", "cmd_py", "cmd_pz",
    "u_omega", "tau_u", "tau_r", "tau_x", "tau_y", "tau_z",
    "residual_max", "clamp", "filter", "omega_err",
)
HEADER = ("t", "id", "type") + FIELDS + ("lyapunov",)
COL = {name: idx for idx, name in enumerate(FIELDS)}


@dataclass(frozen=True)
class TelemetryRecord:
    """One vehicle's snapshot at one tick (values NaN where not applicable)."""

    t: float
    vehicle: int
    kind: str
    state: np.ndarray
    phi: np.ndarray
    command: np.ndarray
    coordinate_rate: float
    actuators: np.ndarray
    residual_max: float
    clamp_active: bool
    filter_active: bool
    lyapunov: float


@dataclass
class Telemetry:
    """Dense per-run arrays: ``data[tick, vehicle, field]`` plus metadata."""

    dt: float
    kinds: tuple
    data: np.ndarray
    lyapunov: np.ndarray
    aborted: bool = False
    abort_reason: Optional[str] = None

    @property
    def n_ticks(self) -> int:
        return self.data.shape[0]

    @property
    def n_vehicles(self) -> int:
        return self.data.shape[1]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_ticks) * self.dt

    def column(self, name: str) -> np.ndarray:
        """(n_ticks, n_vehicles) slice for one named field."""
        return self.data[:, :, COL[name]]

    def records(self) -> Iterator[TelemetryRecord]:
        times = self.times
        for tick in range(self.n_ticks):
            for g in range(self.n_vehicles):
                row = self.data[tick, g]
                kind = self.kinds[g]
                if kind == "usv":
                    state = row[[COL["q_x"], COL["q_y"], COL["psi"], COL["u"],
                                 COL["v"], COL["r"], COL["omega"]]]
                    phi = row[[COL["phi_x"], COL["phi_y"]]]
                    command = row[[COL["cmd_u"], COL["cmd_v"]]]
                    actuators = row[[COL["tau_u"], COL["tau_r"]]]
                else:
                    state = row[[COL["q_x"], COL["q_y"], COL["q_z"], COL["p_x"],
                                 COL["p_y"], COL["p_z"], COL["omega"]]]
                    phi = row[[COL["phi_x"], COL["phi_y"], COL["phi_z"]]]
                    command = row[[COL["cmd_px"], COL["cmd_py"], COL["cmd_pz"]]]
                    actuators = row[[COL["tau_x"], COL["tau_y"], COL["tau_z"]]]
                yield TelemetryRecord(
                    t=float(times[tick]), vehicle=g, kind=kind,
                    state=state.copy(), phi=phi.copy(), command=command.copy(),
                    coordinate_rate=float(row[COL["u_omega"]]),
                    actuators=actuators.copy(),
                    residual_max=float(row[COL["residual_max"]]),
                    clamp_active=row[COL["clamp"]] == 1.0,
                    filter_active=row[COL["filter"]] == 1.0,
                    lyapunov=float(self.lyapunov[tick]),
                )

    def write_csv(self, path) -> None:
        times = self.times
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(HEADER)
            for tick in range(self.n_ticks):
                t_str = repr(float(times[tick]))
                v_str = _fmt(self.lyapunov[tick])
                for g in range(self.n_vehicles):
                    row = [t_str, str(g), self.kinds[g]]
                    values = self.data[tick, g]
                    for idx, name in enumerate(FIELDS):
                        if name in ("clamp", "filter"):
                            row.append("" if np.isnan(values[idx])
                                       else str(int(values[idx])))
                        else:
                            row.append(_fmt(values[idx]))
                    row.append(v_str)
                    writer.writerow(row)

    @classmethod
    def read_csv(cls, path) -> "Telemetry":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = tuple(next(reader))
            if header != HEADER:
                raise ValueError(f"unexpected telemetry header in {path}")
            rows = list(reader)
        if not rows:
            raise ValueError(f"telemetry file {path} has no data rows")
        n_vehicles = 0
        while n_vehicles < len(rows) and rows[n_vehicles][0] == rows[0][0]:
            n_vehicles += 1
        n_ticks = len(rows) // n_vehicles
        if n_ticks * n_vehicles != len(rows):
            raise ValueError(f"telemetry file {path} has a ragged tick grid")
        kinds = tuple(rows[g][2] for g in range(n_vehicles))
        data = np.empty((n_ticks, n_vehicles, len(FIELDS)))
        lyap = np.empty(n_ticks)
        for tick in range(n_ticks):
            for g in range(n_vehicles):
                row = rows[tick * n_vehicles + g]
                for idx in range(len(FIELDS)):
                    data[tick, g, idx] = _parse(row[3 + idx])
                lyap[tick] = _parse(row[3 + len(FIELDS)])
        if n_ticks >= 2:
            dt = _parse(rows[n_vehicles][0]) - _parse(rows[0][0])
        else:
            dt = float("nan")
        return cls(dt=dt, kinds=kinds, data=data, lyapunov=lyap)


def _fmt(value: float) -> str:
    return "" if np.isnan(value) else repr(float(value))


def _parse(text: str) -> float:
    return float("nan") if text == "" else float(text)
