"""Coordinated path navigation for mixed surface-vessel / aerial fleets.

The package simulates a hierarchical guiding-vector-field controller: an
upper guidance layer produces desired velocities and a virtual-coordinate
rate from a singularity-free augmented vector field plus a scalar consensus
coupling, and a lower regulator layer tracks those references on the
vessel's 3-DOF dynamics or the aerial vehicle's double integrator.  An
optional barrier-function QP keeps pairwise separations above a safe
radius.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConnectivityError,
    DegenerateGeometryError,
    GvfleetError,
    QpInfeasibleError,
    SimulationAbort,
    UnsupportedPathError,
    UnsupportedTopologyError,
)
from .guidance import (
    GuidanceCommand,
    GuidanceGains,
    desired_coordinate_rate,
    uav_guidance,
    usv_guidance,
)
from .network import (
    CoordinateView,
    Topology,
    build_laplacian,
    chain_topology,
    consensus_residuals,
    consensus_term,
    exchange,
    has_spanning_tree,
    ring_topology,
    topology_from_edges,
)
from .paths import (
    PathError,
    PathSpec,
    circle_path,
    custom_path,
    eval_path,
    gvf_augmented,
    gvf_physical,
    lissajous_path,
    path_error,
    trig_series_path,
)
from .regulator import (
    DerivativeFilter,
    RegulatorGains,
    TrackingErrors,
    UavRegulator,
    UsvRegulator,
    uav_control,
    usv_control,
)
from .safety import BarrierConstraint, SafetyConfig, build_constraints, qp_filter
from .scenario import ScenarioConfig, load_scenario
from .sim import MetricsSummary, compute_metrics, lyapunov_value, run_scenario
from .telemetry import Telemetry, TelemetryRecord
from .vehicles import (
    UavState,
    UsvParams,
    UsvState,
    integrate_step,
    uav_derivative,
    uav_step,
    usv_derivative,
    usv_step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
