"""Coupling topologies between oscillator nodes."""

from chaoscomm.network.coupling import (CouplingSpec, Edge, ExternalDrive,
                                        all_to_all_adjacency, bidirectional,
                                        directional, external_driving,
                                        network_coupling, ring_adjacency)

__all__ = [
    "CouplingSpec",
    "Edge",
    "ExternalDrive",
    "all_to_all_adjacency",
    "bidirectional",
    "directional",
    "external_driving",
    "network_coupling",
    "ring_adjacency",
]
