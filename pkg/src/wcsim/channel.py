"""Path-loss channel, SNR-threshold connectivity, and minimal power control.

Connectivity follows the protocol model: a transmission is received iff its
received power meets the SNR threshold gamma. Cooperating clusters combine
either coherently (fixed phase: amplitudes add) or incoherently (uniform
phase: powers add, the large-block expectation).

All membership tests are written in the form ``P >= (gamma/G) / S`` so that
a minimal power computed as ``(gamma/G) / S_min`` meets the threshold at the
worst receiver with exact float equality.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from wcsim.topology import NodePlacement


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    """Path-loss exponent, path-loss constant, SNR threshold, phase mode."""

    alpha: float
    gamma: float  # linear
    G: float = None
    phase_mode: str = "fixed"

    def __post_init__(self) -> None:
        if self.alpha < 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if self.phase_mode not in ("fixed", "uniform"):
            raise ValueError(f"unknown phase mode {self.phase_mode!r}")
        if self.G is None:
            # default from the usual numerics; keeps most gains below unity
            object.__setattr__(self, "G", 10.0 ** (-3.0 * self.alpha / 2.0))
        if self.G <= 0:
            raise ValueError(f"G must be positive, got {self.G}")

    @classmethod
    def from_db(cls, alpha: float, gamma_db: float, phase_mode: str = "fixed",
                G: float = None) -> "ChannelParams":
        return cls(alpha=alpha, gamma=db_to_linear(gamma_db), G=G,
                   phase_mode=phase_mode)

    @property
    def power_factor(self) -> float:
        """gamma / G, the distance-to-power conversion of the protocol model."""
        return self.gamma / self.G


@dataclass(frozen=True)
class PowerAssignment:
    """Transmit powers for one time slot; absent ids are silent."""

    slot: int
    kind: str  # "node" or "cluster"
    powers: Mapping

    def __post_init__(self) -> None:
        if self.kind not in ("node", "cluster"):
            raise ValueError(f"unknown transmitter kind {self.kind!r}")
        if any(p < 0 for p in self.powers.values()):
            raise ValueError("transmit powers must be nonnegative")


def _powers_of(powers) -> Mapping:
    return powers.powers if isinstance(powers, PowerAssignment) else powers


def gain_magnitude(params: ChannelParams, distance: float) -> float:
    """Channel gain magnitude sqrt(G) * d^(-alpha/2)."""
    if distance <= 0:
        raise ValueError("self-channel (d = 0) is undefined")
    return np.sqrt(params.G) * distance ** (-params.alpha / 2.0)


def check_gains(params: ChannelParams, placement: NodePlacement) -> bool:
    """Warn if some realized gain magnitude exceeds unity on this placement."""
    d = placement.distances + np.eye(placement.n_nodes)
    d_min = float(d.min())
    ok = gain_magnitude(params, d_min) <= 1.0
    if not ok:
        warnings.warn(
            f"gain magnitude exceeds 1 at d={d_min:.3g} "
            f"(G={params.G:.3g}, alpha={params.alpha}); scaling laws unaffected",
            stacklevel=2)
    return ok


def node_neighborhood(params: ChannelParams, placement: NodePlacement,
                      powers, n: int) -> set:
    """Active transmitters whose signal reaches node ``n``."""
    pf = params.power_factor
    d = placement.distances
    return {m for m, p in _powers_of(powers).items()
            if m != n and p >= pf * d[m, n] ** params.alpha}


def cluster_received_power(params: ChannelParams, placement: NodePlacement,
                           cluster, powers, n: int) -> float:
    """Received power at node ``n`` from a cooperating cluster."""
    members = list(cluster)
    if n in members:
        raise ValueError("receiver must lie outside the transmitting cluster")
    pw = _powers_of(powers)
    d = placement.distances
    if params.phase_mode == "fixed":
        amp = sum(d[m, n] ** (-params.alpha / 2.0) * np.sqrt(pw[m]) for m in members)
        return params.G * amp ** 2
    return params.G * sum(d[m, n] ** (-params.alpha) * pw[m] for m in members)


def cluster_neighborhood(params: ChannelParams, placement: NodePlacement,
                         clusters: Mapping, powers, n: int) -> set:
    """Transmitting clusters whose combined signal reaches node ``n``.

    ``clusters`` maps cluster id to its member node set; clusters must be
    disjoint. A node never receives its own cluster.
    """
    out = set()
    for cid, members in clusters.items():
        members = list(members)
        if not members or n in members:
            continue
        if cluster_received_power(params, placement, members, powers, n) >= params.gamma:
            out.add(cid)
    return out


def cluster_of_cluster_neighborhood(params: ChannelParams, placement: NodePlacement,
                                    clusters: Mapping, powers,
                                    receiver_cluster) -> set:
    """Clusters heard by at least one node of ``receiver_cluster``."""
    out = set()
    for n in clusters[receiver_cluster]:
        out |= cluster_neighborhood(params, placement, clusters, powers, int(n))
    return out


def min_broadcast_power_node(params: ChannelParams, placement: NodePlacement,
                             n: int, targets) -> float:
    """Smallest power for node ``n`` to reach every node in ``targets``."""
    targets = set(int(t) for t in targets)
    if not targets:
        raise ValueError("target set must be nonempty")
    if targets == {n}:
        return 0.0
    d_max = max(placement.distances[n, m] for m in targets)
    return params.power_factor * d_max ** params.alpha


def min_cooperative_power_cluster(params: ChannelParams, placement: NodePlacement,
                                  cluster, receivers) -> float:
    """Smallest uniform per-node power so the cluster reaches all receivers.

    Receivers inside the cluster are ignored; an empty effective receiver
    set is an error.
    """
    members = np.asarray(sorted(int(m) for m in cluster))
    recv = np.asarray(sorted(set(int(r) for r in receivers) - set(members.tolist())))
    if recv.size == 0:
        raise ValueError("no receivers outside the cluster")
    d = placement.distances[np.ix_(members, recv)]
    if params.phase_mode == "fixed":
        strength = (d ** (-params.alpha / 2.0)).sum(axis=0) ** 2
    else:
        strength = (d ** (-params.alpha)).sum(axis=0)
    return params.power_factor / float(strength.min())
