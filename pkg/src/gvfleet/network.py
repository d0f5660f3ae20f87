"""Communication topology, Laplacian machinery and virtual-coordinate exchange.

The fleet coordinates through a weighted directed graph: ``adjacency[i, k] > 0``
means vehicle ``i`` receives vehicle ``k``'s virtual coordinate. ``delta[i, k]``
is the displacement the pair should hold between their coordinates
(``omega_i - omega_k -> delta[i, k]``); it is antisymmetric on every edge.

Exchange is synchronous and lossless: each tick every vehicle reads its
neighbours' coordinates from the same global snapshot.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError


def build_laplacian(adjacency) -> np.ndarray:
    """Degree-minus-adjacency Laplacian; rows sum to zero by construction."""
    a = np.asarray(adjacency, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if np.any(a < 0.0):
        raise ValueError("adjacency weights must be nonnegative")
    if np.any(np.diag(a) != 0.0):
        raise ValueError("adjacency diagonal must be zero")
    lap = -a.copy()
    np.fill_diagonal(lap, a.sum(axis=1))
    return lap


def has_spanning_tree(adjacency) -> bool:
    """True iff some root reaches every vehicle along information-flow edges.

    ``adjacency[i, k] > 0`` sends information k -> i, so reachability is
    computed on the transposed boolean graph via repeated squaring of the
    closure matrix.
    """
    a = np.asarray(adjacency, dtype=np.float64)
    n = a.shape[0]
    if n == 1:
        return True
    reach = (a.T > 0.0) | np.eye(n, dtype=bool)
    for _ in range(int(np.ceil(np.log2(n))) + 1):
        nxt = reach | (reach @ reach)
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return bool(np.any(reach.all(axis=1)))


@dataclass(frozen=True)
class CoordinateView:
    """What one vehicle sees after an exchange: its neighbours' coordinates."""

    index: int
    omega: float
    neighbor_ids: tuple
    neighbor_omega: np.ndarray
    weights: np.ndarray
    deltas: np.ndarray


@dataclass
class Topology:
    """Adjacency, displacements and derived Laplacian for the fleet graph."""

    adjacency: np.ndarray
    delta: np.ndarray
    period: Optional[float] = None
    laplacian: np.ndarray = field(init=False)

    def __post_init__(self):
        self.adjacency = np.asarray(self.adjacency, dtype=np.float64)
        self.delta = np.asarray(self.delta, dtype=np.float64)
        if self.delta.shape != self.adjacency.shape:
            raise ValueError("delta must have the same shape as adjacency")
        self.laplacian = build_laplacian(self.adjacency)

    @property
    def n_total(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_undirected(self) -> bool:
        return bool(np.array_equal(self.adjacency, self.adjacency.T))

    def neighbors(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adjacency[i] > 0.0)

    def validate(self, tol: float = 1e-9) -> None:
        """Enforce the coordination invariants used by the controllers.

        * a directed spanning tree exists;
        * delta is antisymmetric on every (bidirectional) edge;
        * around every cycle the displacements sum to zero, or to an integer
          multiple of ``period`` when one is declared (periodic formations).
        """
        if not has_spanning_tree(self.adjacency):
            raise ConfigError("topology has no directed spanning tree")
        mask = (self.adjacency > 0.0) & (self.adjacency.T > 0.0)
        skew = np.abs(self.delta + self.delta.T)
        if np.any(skew[mask] > tol):
            raise ConfigError("delta is not antisymmetric on bidirectional edges")
        theta = self.delta_potentials()
        support = (self.adjacency > 0.0) | (self.adjacency.T > 0.0)
        for i in range(self.n_total):
            for k in range(self.n_total):
                if not support[i, k] or self.adjacency[i, k] == 0.0:
                    continue
                gap = theta[i] - theta[k] - self.delta[i, k]
                if self.period is not None and self.period > 0.0:
                    gap = gap - self.period * np.round(gap / self.period)
                if abs(gap) > tol * max(1.0, abs(self.delta[i, k])):
                    raise ConfigError(
                        f"delta is inconsistent around a cycle at edge ({i},{k}); "
                        f"residual {gap:.3e}"
                    )

    def delta_potentials(self) -> np.ndarray:
        """Node potentials theta with theta_i - theta_k = delta_ik on a BFS tree.

        Potentials are anchored at vehicle 0.  Edges outside the tree may be
        off by multiples of ``period`` for periodic formations; the tree
        choice (deterministic BFS order) fixes that gauge.
        """
        n = self.n_total
        support = (self.adjacency > 0.0) | (self.adjacency.T > 0.0)
        theta = np.zeros(n)
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = [0]
        while queue:
            i = queue.pop(0)
            for k in range(n):
                if not support[i, k] or seen[k]:
                    continue
                if self.adjacency[i, k] > 0.0:
                    theta[k] = theta[i] - self.delta[i, k]
                else:
                    theta[k] = theta[i] + self.delta[k, i]
                seen[k] = True
                queue.append(k)
        if not seen.all():
            raise ConfigError("topology support graph is disconnected")
        return theta


def ring_topology(n: int, weight: float = 1.0, delta=0.0,
                  undirected: bool = True, period: Optional[float] = None) -> Topology:
    """Cycle 0-1-...-(n-1)-0.  ``delta`` is a scalar or one value per edge."""
    deltas = np.broadcast_to(np.asarray(delta, dtype=np.float64), (n,))
    edges = [(i, (i + 1) % n, weight, deltas[i]) for i in range(n)]
    return topology_from_edges(n, edges, undirected=undirected, period=period)


def chain_topology(n: int, weight: float = 1.0, delta=0.0,
                   undirected: bool = True, period: Optional[float] = None) -> Topology:
    """Open chain 0-1-...-(n-1)."""
    deltas = np.broadcast_to(np.asarray(delta, dtype=np.float64), (max(n - 1, 0),))
    edges = [(i, i + 1, weight, deltas[i]) for i in range(n - 1)]
    return topology_from_edges(n, edges, undirected=undirected, period=period)


def topology_from_edges(n: int, edges, undirected: bool = True,
                        period: Optional[float] = None) -> Topology:
    """Build a Topology from ``(i, k, weight, delta_ik)`` tuples.

    With ``undirected=True`` each edge also installs the reverse direction
    with the same weight and negated delta; conflicting duplicate entries
    are rejected.
    """
    adjacency = np.zeros((n, n))
    delta = np.zeros((n, n))
    listed = np.zeros((n, n), dtype=bool)
    for entry in edges:
        i, k, weight, d = int(entry[0]), int(entry[1]), float(entry[2]), float(entry[3])
        if not (0 <= i < n and 0 <= k < n) or i == k:
            raise ConfigError(f"bad edge ({i},{k}) for {n} vehicles")
        if weight <= 0.0:
            raise ConfigError(f"edge ({i},{k}) weight must be positive")
        for a, b, dd in ((i, k, d), (k, i, -d)) if undirected else ((i, k, d),):
            if listed[a, b] and (adjacency[a, b] != weight or delta[a, b] != dd):
                raise ConfigError(f"conflicting duplicate edge ({a},{b})")
            adjacency[a, b] = weight
            delta[a, b] = dd
            listed[a, b] = True
    return Topology(adjacency=adjacency, delta=delta, period=period)


def exchange(omega, topology: Topology) -> list:
    """Synchronous broadcast: per-vehicle views of neighbour coordinates."""
    omega = np.asarray(omega, dtype=np.float64)
    if omega.shape != (topology.n_total,):
        raise ValueError(
            f"omega has length {omega.shape}, topology has {topology.n_total} vehicles"
        )
    views = []
    for i in range(topology.n_total):
        nbr = topology.neighbors(i)
        views.append(CoordinateView(
            index=i,
            omega=float(omega[i]),
            neighbor_ids=tuple(int(k) for k in nbr),
            neighbor_omega=omega[nbr].copy(),
            weights=topology.adjacency[i, nbr].copy(),
            deltas=topology.delta[i, nbr].copy(),
        ))
    return views


def consensus_residuals(view: CoordinateView) -> np.ndarray:
    """Per-neighbour residuals ``omega_i - omega_k - delta_ik``."""
    return view.omega - view.neighbor_omega - view.deltas


def consensus_term(view: CoordinateView, c: float) -> float:
    """Coordination feedback ``-c * sum_k a_ik (omega_i - omega_k - delta_ik)``.

    Weights multiply each residual so the flow matches the weighted
    Laplacian used by the energy diagnostic; on unit-weight graphs this is
    the plain neighbour sum.
    """
    return float(-c * np.sum(view.weights * consensus_residuals(view)))
