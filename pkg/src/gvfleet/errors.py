"""Exception types shared across the package."""


class GvfleetError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(GvfleetError):
    """Scenario input is missing, malformed, or violates a load-time invariant."""


class ConnectivityError(ConfigError):
    """The communication topology has no directed spanning tree."""


class UnsupportedPathError(GvfleetError):
    """The requested operation is not defined for this path kind."""


class UnsupportedTopologyError(GvfleetError):
    """The requested diagnostic is only defined for undirected topologies."""


class DegenerateGeometryError(GvfleetError):
    """Two vehicles are (numerically) coincident; barrier geometry is undefined."""


class QpInfeasibleError(GvfleetError):
    """The safety QP constraint set admits no feasible velocity."""


class SimulationAbort(GvfleetError):
    """A run stopped early; ``telemetry`` holds the ticks completed so far."""

    def __init__(self, message, telemetry=None, tick=None):
        super().__init__(message)
        self.telemetry = telemetry
        self.tick = tick
