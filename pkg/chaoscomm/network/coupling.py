"""
Coupling topologies between Mackey-Glass nodes.

Node j drives node i through an edge (j -> i, kappa_c, tau_c) that adds
kappa_c * f(x_j(t - tau_c)) to the input of node i. Self-feedback is part of
each node's OscillatorParams and never an edge. Gains are used as given; the
summed input of a node is not normalized by its in-degree.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from chaoscomm.core.errors import (EmptyNodeSet, InvalidParameter,
                                   NonzeroDiagonal, SelfCoupling)
from chaoscomm.dynamics.drive import DriveSignal

logger = logging.getLogger("chaoscomm.network")


@dataclass(frozen=True)
class Edge:
    """Directed coupling src -> dst with gain kappa_c and delay tau_c (s)."""

    src: int
    dst: int
    kappa_c: float
    tau_c: float


@dataclass(frozen=True)
class ExternalDrive:
    """A shared drive signal applied to a set of nodes."""

    signal: DriveSignal
    nodes: FrozenSet[int]


@dataclass(frozen=True)
class CouplingSpec:
    """Immutable description of how ``node_count`` nodes drive each other."""

    node_count: int
    edges: Tuple[Edge, ...] = ()
    external_drive: Optional[ExternalDrive] = None
    kind: str = field(default="matrix", compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidParameter("node_count must be >= 1")
        object.__setattr__(self, "edges", tuple(self.edges))
        for edge in self.edges:
            if edge.src == edge.dst:
                raise SelfCoupling(f"edge {edge.src}->{edge.dst} couples a node to itself")
            for node in (edge.src, edge.dst):
                if not 0 <= node < self.node_count:
                    raise InvalidParameter(
                        f"edge {edge.src}->{edge.dst} references node {node} "
                        f"outside 0..{self.node_count - 1}")
            if not edge.tau_c > 0:
                raise InvalidParameter(f"tau_c must be > 0 (got {edge.tau_c})")
        if self.external_drive is not None:
            for node in self.external_drive.nodes:
                if not 0 <= node < self.node_count:
                    raise InvalidParameter(f"drive references missing node {node}")

    def in_edges(self, node: int) -> List[Edge]:
        """Edges that drive ``node``, in declaration order."""
        return [edge for edge in self.edges if edge.dst == node]

    def drive_for(self, node: int) -> Optional[DriveSignal]:
        if self.external_drive is not None and node in self.external_drive.nodes:
            return self.external_drive.signal
        return None

    @property
    def delays(self) -> List[float]:
        return [edge.tau_c for edge in self.edges]

    def union(self, other: "CouplingSpec") -> "CouplingSpec":
        """Edges of both specs; the node count is the larger of the two."""
        drive = self.external_drive or other.external_drive
        return CouplingSpec(max(self.node_count, other.node_count),
                            self.edges + other.edges, drive, kind="matrix")

    def with_node_count(self, node_count: int) -> "CouplingSpec":
        return CouplingSpec(node_count, self.edges, self.external_drive, self.kind)

    def adjacency(self) -> np.ndarray:
        """Gain matrix with entry [dst, src] (sums parallel edges)."""
        matrix = np.zeros((self.node_count, self.node_count))
        for edge in self.edges:
            matrix[edge.dst, edge.src] += edge.kappa_c
        return matrix

    @classmethod
    def uncoupled(cls, node_count: int) -> "CouplingSpec":
        return cls(node_count, (), None, kind="uncoupled")


def directional(driver: int, follower: int, kappa_c: float = 1.0,
                tau_c: float = 0.018) -> CouplingSpec:
    """Master-slave coupling: the driver feeds the follower, never the reverse."""
    if driver == follower:
        raise SelfCoupling(f"driver and follower are both node {driver}")
    edge = Edge(driver, follower, float(kappa_c), float(tau_c))
    return CouplingSpec(max(driver, follower) + 1, (edge,), kind="directional")


def bidirectional(a: int, b: int, kappa_c: float = 1.0,
                  tau_c: float = 0.018) -> CouplingSpec:
    """Mutual coupling with equal gain and delay in both directions."""
    if a == b:
        raise SelfCoupling(f"cannot couple node {a} with itself")
    edges = (Edge(a, b, float(kappa_c), float(tau_c)),
             Edge(b, a, float(kappa_c), float(tau_c)))
    return CouplingSpec(max(a, b) + 1, edges, kind="bidirectional")


def external_driving(nodes: Iterable[int], drive: DriveSignal, gain: float = 1.0,
                     node_count: Optional[int] = None) -> CouplingSpec:
    """Add the same drive d(t) to each listed node; no edges between nodes."""
    node_set = frozenset(int(n) for n in nodes)
    if not node_set:
        raise EmptyNodeSet("external driving needs at least one node")
    count = node_count if node_count is not None else max(node_set) + 1
    signal = drive if gain == 1.0 else drive.scaled(gain)
    return CouplingSpec(count, (), ExternalDrive(signal, node_set), kind="external")


def network_coupling(node_count: int, adjacency: Sequence[Sequence[float]],
                     tau_c=0.018) -> CouplingSpec:
    """One edge per nonzero entry of ``adjacency``.

    Args:
        node_count: Number of nodes N.
        adjacency: N x N gains; entry [i][j] is the gain of edge j -> i.
        tau_c: Delay for every edge, or an N x N matrix of per-edge delays.
    """
    matrix = np.asarray(adjacency, dtype=float)
    if matrix.shape != (node_count, node_count):
        raise InvalidParameter(
            f"adjacency must be {node_count}x{node_count}, got {matrix.shape}")
    if np.any(np.diag(matrix) != 0):
        raise NonzeroDiagonal("self-feedback belongs to OscillatorParams, not the matrix")
    delays = np.broadcast_to(np.asarray(tau_c, dtype=float), matrix.shape)
    edges = tuple(Edge(int(src), int(dst), float(matrix[dst, src]), float(delays[dst, src]))
                  for dst in range(node_count) for src in range(node_count)
                  if matrix[dst, src] != 0)
    logger.debug(f"network coupling: {node_count} nodes, {len(edges)} edges")
    return CouplingSpec(node_count, edges, kind="matrix")


def ring_adjacency(node_count: int, kappa_c: float, directed: bool = False) -> np.ndarray:
    """Nearest-neighbour ring; undirected unless ``directed``."""
    matrix = np.zeros((node_count, node_count))
    for i in range(node_count):
        matrix[(i + 1) % node_count, i] = kappa_c
        if not directed:
            matrix[(i - 1) % node_count, i] = kappa_c
    np.fill_diagonal(matrix, 0.0)
    return matrix


def all_to_all_adjacency(node_count: int, kappa_c: float) -> np.ndarray:
    matrix = np.full((node_count, node_count), float(kappa_c))
    np.fill_diagonal(matrix, 0.0)
    return matrix
