"""The consensus algorithms: slot-by-slot dynamics with resource accounting.

Five runners share a common contract: draw initial measurements uniform on
[0, 1), iterate the algorithm's update while reporting every time slot's
transmit powers and frequency-slot count to a ledger, and return the folded
metrics as a RunResult.

Gossip-family algorithms require a connected geometric graph at the gossip
radius; hierarchical averaging uses the 4-ary cell partition and finishes
in exactly T slots.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from wcsim import _fast
from wcsim.channel import ChannelParams, check_gains, db_to_linear
from wcsim.ledger import ResourceLedger, RunResult, SlotRecord, epsilon_stop, mse
from wcsim.quantizer import (
    QuantizerSpec,
    dithered_quantize,
    dithered_quantize_lattice,
    quantize_index,
)
from wcsim.streams import ALGORITHMS, derive_stream
from wcsim.topology import (
    HierarchyPartition,
    NodePlacement,
    build_hierarchy,
    connected_placement,
    geometric_graph,
    gossip_radius,
    place_nodes_from_rng,
)

_GOSSIP_FAMILY = ("randomized", "path", "qconsensus")
_MEAN_TOL = 1e-12


@dataclass
class EstimateVector:
    """Per-node estimates plus the immutable initial measurements."""

    z: np.ndarray
    t: int
    z0: np.ndarray
    z_ave: float

    @classmethod
    def from_measurements(cls, z0: np.ndarray) -> "EstimateVector":
        z0 = np.asarray(z0, dtype=float)
        z0.setflags(write=False)
        return cls(z=z0.copy(), t=0, z0=z0, z_ave=float(z0.mean()))


@dataclass(frozen=True)
class RunConfig:
    """One simulated trial's inputs."""

    algorithm: str
    n_nodes: int
    alpha: float = 4.0
    gamma_db: float = 10.0
    epsilon: float = 1e-4
    kappa: float = 1e-4
    k_uses: int = 10
    phase_mode: str = "fixed"
    u: float = 0.0
    seed: int = 0
    trial: int = 0
    radius_c: float = 4.0
    max_slots: int = None
    track_bandwidth: bool = True
    validate: bool = False
    keep_history: bool = False

    def __post_init__(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.n_nodes < 2:
            raise ValueError("need at least 2 nodes")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < self.kappa < 1:
            raise ValueError("kappa must be in (0, 1)")
        if self.k_uses < 1:
            raise ValueError("K must be >= 1")
        if self.u < 0:
            raise ValueError("u must be >= 0")
        if self.max_slots is not None and self.max_slots <= 0:
            raise ValueError("max_slots must be positive")

    @property
    def is_quantized(self) -> bool:
        return self.algorithm in ("qconsensus", "qhierarchical")

    @property
    def gamma_linear(self) -> float:
        return db_to_linear(self.gamma_db)

    @property
    def gamma_effective(self) -> float:
        """Link SNR actually used: gamma * N^u for quantized runs."""
        if self.is_quantized:
            return self.gamma_linear * self.n_nodes ** self.u
        return self.gamma_linear

    def channel_params(self) -> ChannelParams:
        return ChannelParams(alpha=self.alpha, gamma=self.gamma_effective,
                             phase_mode=self.phase_mode)

    def quantizer_spec(self) -> QuantizerSpec:
        return QuantizerSpec.from_link(self.k_uses, self.gamma_effective)

    def stream(self, purpose: str) -> np.random.Generator:
        return derive_stream(self.seed, self.algorithm, self.n_nodes,
                             self.trial, purpose)

    def resolved_max_slots(self) -> int:
        if self.max_slots is not None:
            return self.max_slots
        if self.algorithm == "qconsensus":
            return 50 * self.n_nodes ** 2
        return 1000 * self.n_nodes


def run_trial(config: RunConfig) -> RunResult:
    """Build the placement for ``config`` and dispatch the algorithm."""
    rng_place = config.stream("placement")
    if config.algorithm in _GOSSIP_FAMILY:
        placement, adjacency, resamples = connected_placement(
            config.n_nodes, rng_place, config.radius_c)
        runner = {
            "randomized": randomized_gossip_run,
            "path": path_averaging_run,
            "qconsensus": quantized_consensus_run,
        }[config.algorithm]
        return runner(config, placement, adjacency=adjacency, resamples=resamples)
    placement = place_nodes_from_rng(config.n_nodes, rng_place)
    hierarchy = build_hierarchy(placement, config.kappa)
    runner = (hierarchical_run if config.algorithm == "hierarchical"
              else quantized_hierarchical_run)
    return runner(config, placement, hierarchy=hierarchy)


# ---------------------------------------------------------------------------
# matching and per-slot bandwidth helpers


def random_matching(adjacency: sparse.csr_matrix, rng: np.random.Generator) -> set:
    """Maximal random matching; returns a set of frozenset pairs.

    Nodes are visited in random order; each unmatched node pairs with a
    uniformly chosen unmatched neighbor, leftovers idle.
    """
    n = adjacency.shape[0]
    pa, pb = _fast.greedy_matching(adjacency.indptr.astype(np.int64),
                                   adjacency.indices.astype(np.int64),
                                   rng.permutation(n), rng.random(n))
    return {frozenset((int(a), int(b))) for a, b in zip(pa, pb)}


def _csr_arrays(adjacency: sparse.csr_matrix):
    return adjacency.indptr.astype(np.int64), adjacency.indices.astype(np.int64)


def _induced_bandwidth(indptr, indices, transmitters, validate: bool):
    """B(t) for equal-power, symmetric-radius transmitters.

    The one-hop conflict graph is the induced geometric subgraph; returns
    (bandwidth, lower, upper) with the Eq-style sandwich bounds.
    """
    if transmitters.size == 0:
        return 0, 0, 0
    sub_indptr, sub_indices = _fast.induced_subgraph(indptr, indices, transmitters)
    n_colors, _, max_deg2, proper = _fast.color_two_hop(
        sub_indptr, sub_indices, transmitters.size)
    n_colors = int(max(n_colors, 1))  # lone transmitters still use one slot
    if validate:
        lower = int(np.diff(sub_indptr).max())
        upper = int(max_deg2) + 1
        if not (proper and lower <= n_colors <= upper):
            raise AssertionError("coloring sandwich violated")
        return n_colors, lower, upper
    return n_colors, None, None


def _dense_bandwidth(reach: np.ndarray, validate: bool):
    """B(t) from a directed reach matrix (reach[i, j]: i's signal decodable
    at j) over the slot's transmitters."""
    if reach.shape[0] == 0:
        return 0, 0, 0
    np.fill_diagonal(reach, False)
    adj = sparse.csr_matrix(reach | reach.T)
    adj.sort_indices()
    n_colors, _, max_deg2, proper = _fast.color_two_hop(
        adj.indptr.astype(np.int64), adj.indices.astype(np.int64), reach.shape[0])
    n_colors = int(max(n_colors, 1))
    if validate:
        lower = int(reach.sum(axis=0).max())
        upper = int(max_deg2) + 1
        if not (proper and lower <= n_colors <= upper):
            raise AssertionError("coloring sandwich violated")
        return n_colors, lower, upper
    return n_colors, None, None


# ---------------------------------------------------------------------------
# gossip family


def _gossip_power(config: RunConfig, params: ChannelParams) -> float:
    r = gossip_radius(config.n_nodes, config.radius_c)
    return params.power_factor * r ** params.alpha


def randomized_gossip_run(config: RunConfig, placement: NodePlacement,
                          adjacency=None, resamples: int = 0) -> RunResult:
    """Synchronized randomized gossip: matched pairs average each slot."""
    start = time.perf_counter()
    params = config.channel_params()
    if adjacency is None:
        adjacency = geometric_graph(
            placement, gossip_radius(config.n_nodes, config.radius_c))
    if config.validate:
        check_gains(params, placement)
    indptr, indices = _csr_arrays(adjacency)
    power = _gossip_power(config, params)

    est = EstimateVector.from_measurements(config.stream("init").random(config.n_nodes))
    z0_norm = float(np.linalg.norm(est.z0))
    rng = config.stream("matching")
    ledger = ResourceLedger(config.k_uses, config.keep_history)

    converged = False
    sandwich = []
    for t in range(1, config.resolved_max_slots() + 1):
        pa, pb = _fast.greedy_matching(indptr, indices, rng.permutation(config.n_nodes),
                                       rng.random(config.n_nodes))
        if pa.size:
            avg = 0.5 * (est.z[pa] + est.z[pb])
            est.z[pa] = avg
            est.z[pb] = avg
        est.t = t
        n_tx = 2 * pa.size
        bandwidth = None
        if config.track_bandwidth:
            tx = np.sort(np.concatenate([pa, pb]))
            bandwidth, lower, upper = _induced_bandwidth(indptr, indices, tx,
                                                         config.validate)
            if config.validate:
                sandwich.append((lower, bandwidth, upper))
        ledger.record_slot(SlotRecord(t, power * n_tx, bandwidth, n_tx))
        if config.validate and abs(est.z.mean() - est.z_ave) > _MEAN_TOL:
            raise AssertionError("pairwise averaging failed to preserve the mean")
        if epsilon_stop(est.z, z0_norm, config.epsilon, est.z_ave):
            converged = True
            break

    extras = {"sandwich": sandwich} if config.validate else {}
    return RunResult(config=config, t_slots=ledger.t_slots, e_energy=ledger.e_energy,
                     b_tbp=ledger.b_tbp, mse=None, converged=converged,
                     resamples=resamples, wall_time=time.perf_counter() - start,
                     extras=extras)


def _lexicographic_path(dist, indptr, indices, src: int, dst: int) -> list:
    """Shortest-hop path src -> dst, ties broken by smallest next-hop id.

    ``dist`` holds hop counts to ``dst`` for every node.
    """
    path = [src]
    cur = src
    while cur != dst:
        want = dist[cur] - 1
        for jj in range(indptr[cur], indptr[cur + 1]):  # indices sorted: lexicographic
            w = indices[jj]
            if dist[w] == want:
                path.append(int(w))
                cur = int(w)
                break
        else:
            raise RuntimeError("graph is not connected")
    return path


def path_averaging_run(config: RunConfig, placement: NodePlacement,
                       adjacency=None, resamples: int = 0) -> RunResult:
    """Path averaging: random pairs exchange along multi-hop routes.

    Each exchange over a path P charges 2(|P|-1) sequential slots, one
    transmission per slot, B(slot) = 1; all path nodes adopt the path mean.
    """
    start = time.perf_counter()
    params = config.channel_params()
    if adjacency is None:
        adjacency = geometric_graph(
            placement, gossip_radius(config.n_nodes, config.radius_c))
    if config.validate:
        check_gains(params, placement)
    indptr, indices = _csr_arrays(adjacency)
    power = _gossip_power(config, params)

    n = config.n_nodes
    est = EstimateVector.from_measurements(config.stream("init").random(n))
    z0_norm = float(np.linalg.norm(est.z0))
    rng = config.stream("pairs")
    ledger = ResourceLedger(config.k_uses, config.keep_history)
    max_slots = config.resolved_max_slots()
    # hop counts to every destination, computed once per run
    dist = dijkstra(adjacency, unweighted=True, directed=False)

    converged = False
    path_lengths = []
    while ledger.t_slots < max_slots:
        src = int(rng.integers(n))
        dst = int(rng.integers(n - 1))
        if dst >= src:
            dst += 1
        path = _lexicographic_path(dist[dst], indptr, indices, src, dst)
        n_slots = 2 * (len(path) - 1)
        path_arr = np.asarray(path)
        est.z[path_arr] = est.z[path_arr].mean()
        ledger.record_uniform_slots(n_slots, power,
                                    1 if config.track_bandwidth else None, 1)
        est.t = ledger.t_slots
        if config.keep_history:
            path_lengths.append(len(path))
        if config.validate and abs(est.z.mean() - est.z_ave) > _MEAN_TOL:
            raise AssertionError("path averaging failed to preserve the mean")
        if epsilon_stop(est.z, z0_norm, config.epsilon, est.z_ave):
            converged = True
            break

    extras = {"path_lengths": path_lengths} if config.keep_history else {}
    return RunResult(config=config, t_slots=ledger.t_slots, e_energy=ledger.e_energy,
                     b_tbp=ledger.b_tbp, mse=None, converged=converged,
                     resamples=resamples, wall_time=time.perf_counter() - start,
                     extras=extras)


# ---------------------------------------------------------------------------
# hierarchical family


def _hierarchy_core(config: RunConfig, placement: NodePlacement,
                    hierarchy: HierarchyPartition, quant: QuantizerSpec = None):
    """Shared slot loop of (quantized) hierarchical averaging.

    Returns (final per-node estimates, ledger, z0, sandwich list).
    """
    params = config.channel_params()
    if config.validate:
        check_gains(params, placement)
    n = placement.n_nodes
    levels = hierarchy.n_levels
    alpha, pf = params.alpha, params.power_factor
    fixed = params.phase_mode == "fixed"
    dist = placement.distances

    z0 = config.stream("init").random(n)
    rng_dither = config.stream("dither") if quant is not None else None
    ledger = ResourceLedger(config.k_uses, config.keep_history)
    sandwich = []

    # slot 1: every node broadcasts its (possibly quantized) measurement to
    # its level-1 cell and averages with the approximate normalization
    if quant is not None:
        broadcast = np.array([dithered_quantize(quant, z, rng_dither)[0] for z in z0])
    else:
        broadcast = z0
    cells = hierarchy.cells(1)
    powers = np.zeros(n)
    cell_vals = np.zeros(len(cells))
    norm1 = 4.0 ** (1 - levels) * n
    for cid, members in enumerate(cells):
        if members.size == 0:
            continue
        sub = dist[np.ix_(members, members)]
        powers[members] = pf * sub.max(axis=1) ** alpha
        cell_vals[cid] = broadcast[members].sum() / norm1
    tx = np.nonzero(powers > 0)[0]
    bandwidth = None
    if config.track_bandwidth:
        reach = powers[tx][:, None] >= pf * dist[np.ix_(tx, tx)] ** alpha
        bandwidth, lower, upper = _dense_bandwidth(reach, config.validate)
        if config.validate:
            sandwich.append((lower, bandwidth, upper))
    ledger.record_slot(SlotRecord(1, float(powers.sum()), bandwidth, tx.size))
    if config.validate and quant is None:
        _check_level_invariant(hierarchy, 1, z0, cell_vals, levels)

    # slots 2..T: child cells cooperatively broadcast to their parent cells
    exponent = alpha / 2.0 if fixed else alpha
    for t in range(2, levels + 1):
        child_cells = hierarchy.cells(t - 1)
        parent_cells = hierarchy.cells(t)
        new_vals = np.zeros(len(parent_cells))
        send_vals = cell_vals
        if quant is not None:
            send_vals = cell_vals.copy()
            for cid, members in enumerate(child_cells):
                if members.size:
                    send_vals[cid] = dithered_quantize_lattice(
                        quant, cell_vals[cid], rng_dither)[0]
        power_sum = 0.0
        n_tx_nodes = 0
        tx_clusters = []
        for cid, members in enumerate(child_cells):
            if members.size == 0:
                continue
            parent = hierarchy.parent_cell(t - 1, cid)
            new_vals[parent] += 0.25 * send_vals[cid]
            recv = np.setdiff1d(parent_cells[parent], members, assume_unique=True)
            if recv.size == 0:
                continue
            with np.errstate(divide="ignore"):
                strength = (dist[np.ix_(members, recv)] ** (-exponent)).sum(axis=0)
            if fixed:
                strength = strength ** 2
            p = pf / float(strength.min())
            power_sum += p * members.size
            n_tx_nodes += members.size
            tx_clusters.append((members, p))
        bandwidth = None
        if config.track_bandwidth and tx_clusters:
            bandwidth, lower, upper = _cluster_bandwidth(
                dist, tx_clusters, pf, exponent, fixed, config.validate)
            if config.validate:
                sandwich.append((lower, bandwidth, upper))
        elif config.track_bandwidth:
            bandwidth = 0
        ledger.record_slot(SlotRecord(t, power_sum, bandwidth, n_tx_nodes))
        cell_vals = new_vals
        if config.validate and quant is None:
            _check_level_invariant(hierarchy, t, z0, cell_vals, levels)

    final = np.full(n, cell_vals[0])
    return final, ledger, z0, sandwich


def _cluster_bandwidth(dist, tx_clusters, pf, exponent, fixed, validate):
    """B(t) for cooperatively transmitting clusters via cluster-of-cluster
    neighborhoods."""
    n = dist.shape[0]
    c = len(tx_clusters)
    reach = np.zeros((c, n), dtype=bool)  # reach[i, node]: cluster i decodable
    for i, (members, p) in enumerate(tx_clusters):
        with np.errstate(divide="ignore"):
            strength = (dist[members] ** (-exponent)).sum(axis=0)
        if fixed:
            strength = strength ** 2
        reach[i] = p >= pf / strength
        reach[i, members] = False
    hears = np.zeros((c, c), dtype=bool)  # hears[i, j]: some node of i hears j
    for i, (members, _) in enumerate(tx_clusters):
        hears[i] = reach[:, members].any(axis=1)
    np.fill_diagonal(hears, False)
    adj = sparse.csr_matrix(hears | hears.T)
    adj.sort_indices()
    n_colors, _, max_deg2, proper = _fast.color_two_hop(
        adj.indptr.astype(np.int64), adj.indices.astype(np.int64), c)
    n_colors = int(max(n_colors, 1))
    if validate:
        lower = int(hears.sum(axis=1).max())
        upper = int(max_deg2) + 1
        if not (proper and lower <= n_colors <= upper):
            raise AssertionError("coloring sandwich violated")
        return n_colors, lower, upper
    return n_colors, None, None


def _check_level_invariant(hierarchy, level, z0, cell_vals, levels):
    """Sum over a cell of initial measurements equals 4^(t-T) N z_n(t)."""
    n = z0.shape[0]
    scale = 4.0 ** (level - levels) * n
    for cid, members in enumerate(hierarchy.cells(level)):
        expect = z0[members].sum()
        if abs(cell_vals[cid] * scale - expect) > _MEAN_TOL * max(1.0, abs(expect)):
            raise AssertionError("hierarchical level invariant violated")


def hierarchical_run(config: RunConfig, placement: NodePlacement,
                     hierarchy: HierarchyPartition = None,
                     resamples: int = 0) -> RunResult:
    """Hierarchical averaging over ideal links; exact consensus in T slots."""
    start = time.perf_counter()
    if hierarchy is None:
        hierarchy = build_hierarchy(placement, config.kappa)
    final, ledger, z0, sandwich = _hierarchy_core(config, placement, hierarchy)
    extras = {"final": final, "z_ave": float(z0.mean())}
    if config.validate:
        extras["sandwich"] = sandwich
    return RunResult(config=config, t_slots=ledger.t_slots, e_energy=ledger.e_energy,
                     b_tbp=ledger.b_tbp, mse=None, converged=True,
                     resamples=resamples, wall_time=time.perf_counter() - start,
                     extras=extras)


def quantized_hierarchical_run(config: RunConfig, placement: NodePlacement,
                               hierarchy: HierarchyPartition = None,
                               resamples: int = 0) -> RunResult:
    """Hierarchical averaging with dithered quantization before each broadcast."""
    start = time.perf_counter()
    if hierarchy is None:
        hierarchy = build_hierarchy(placement, config.kappa)
    quant = config.quantizer_spec()
    final, ledger, z0, sandwich = _hierarchy_core(config, placement, hierarchy, quant)
    z_ave = float(z0.mean())
    extras = {"final": final, "z_ave": z_ave}
    if config.validate:
        extras["sandwich"] = sandwich
    return RunResult(config=config, t_slots=ledger.t_slots, e_energy=ledger.e_energy,
                     b_tbp=ledger.b_tbp, mse=mse(final, z_ave), converged=True,
                     resamples=resamples, wall_time=time.perf_counter() - start,
                     extras=extras)


# ---------------------------------------------------------------------------
# quantized consensus


def quantized_consensus_run(config: RunConfig, placement: NodePlacement,
                            adjacency=None, resamples: int = 0) -> RunResult:
    """Gossip on the quantization lattice: one partner rounds up, one down.

    Estimates are tracked as alphabet indices, so the network sum is
    conserved exactly; stops when the spread falls to one bin.
    """
    start = time.perf_counter()
    params = config.channel_params()
    quant = config.quantizer_spec()
    if quant.exact:
        raise ValueError("quantized consensus needs a finite alphabet; "
                         "lower K or gamma")
    if adjacency is None:
        adjacency = geometric_graph(
            placement, gossip_radius(config.n_nodes, config.radius_c))
    if config.validate:
        check_gains(params, placement)
    indptr, indices = _csr_arrays(adjacency)
    power = _gossip_power(config, params)

    n = config.n_nodes
    z0 = config.stream("init").random(n)
    z_ave = float(z0.mean())
    rng_dither = config.stream("dither")
    q = np.array([quantize_index(quant, z, rng_dither) for z in z0], dtype=np.int64)
    q_sum = int(q.sum())
    rng_match = config.stream("matching")
    rng_coin = config.stream("coin")
    ledger = ResourceLedger(config.k_uses, config.keep_history)

    converged = False
    sum_history = [q_sum]
    sandwich = []
    for t in range(1, config.resolved_max_slots() + 1):
        pa, pb = _fast.greedy_matching(indptr, indices, rng_match.permutation(n),
                                       rng_match.random(n))
        if pa.size:
            pair_sum = q[pa] + q[pb]
            up = (pair_sum + 1) // 2
            down = pair_sum // 2
            a_up = rng_coin.random(pa.size) < 0.5
            q[pa] = np.where(a_up, up, down)
            q[pb] = np.where(a_up, down, up)
        n_tx = 2 * pa.size
        bandwidth = None
        if config.track_bandwidth:
            tx = np.sort(np.concatenate([pa, pb]))
            bandwidth, lower, upper = _induced_bandwidth(indptr, indices, tx,
                                                         config.validate)
            if config.validate:
                sandwich.append((lower, bandwidth, upper))
        ledger.record_slot(SlotRecord(t, power * n_tx, bandwidth, n_tx))
        if config.keep_history:
            sum_history.append(int(q.sum()))
        if config.validate and int(q.sum()) != q_sum:
            raise AssertionError("quantized consensus lost the network sum")
        if int(q.max() - q.min()) <= 1:
            converged = True
            break

    final = quant.value_of_index(q)
    extras = {"final": final, "z_ave": z_ave,
              "spread_bins": int(q.max() - q.min())}
    if config.keep_history:
        extras["index_sum_history"] = sum_history
    if config.validate:
        extras["sandwich"] = sandwich
    return RunResult(config=config, t_slots=ledger.t_slots, e_energy=ledger.e_energy,
                     b_tbp=ledger.b_tbp, mse=mse(final, z_ave), converged=converged,
                     resamples=resamples, wall_time=time.perf_counter() - start,
                     extras=extras)
