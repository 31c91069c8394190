"""Averaging consensus over a path-loss wireless network.

Simulates randomized gossip, path averaging, hierarchical averaging and
their quantized variants on random node placements in the unit square,
accounting per time slot for transmit energy and frequency-slot usage.
"""

from wcsim.channel import ChannelParams, PowerAssignment, db_to_linear
from wcsim.consensus import RunConfig
from wcsim.ledger import ResourceLedger, RunResult, SlotRecord, theory_curve
from wcsim.quantizer import QuantizerSpec
from wcsim.topology import (
    DiscRegion,
    HierarchyPartition,
    NodePlacement,
    RectRegion,
    build_hierarchy,
    gossip_radius,
    place_nodes,
)

__all__ = [
    "ChannelParams",
    "PowerAssignment",
    "db_to_linear",
    "RunConfig",
    "ResourceLedger",
    "RunResult",
    "SlotRecord",
    "theory_curve",
    "QuantizerSpec",
    "DiscRegion",
    "HierarchyPartition",
    "NodePlacement",
    "RectRegion",
    "build_hierarchy",
    "gossip_radius",
    "place_nodes",
]

__version__ = "0.1.0"
