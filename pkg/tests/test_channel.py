"""Path-loss gains, threshold neighborhoods, and minimal power control."""

import numpy as np
import pytest

from wcsim import oracles
from wcsim.channel import (
    ChannelParams,
    PowerAssignment,
    cluster_neighborhood,
    cluster_of_cluster_neighborhood,
    cluster_received_power,
    db_to_linear,
    gain_magnitude,
    min_broadcast_power_node,
    min_cooperative_power_cluster,
    node_neighborhood,
)
from wcsim.topology import NodePlacement, place_nodes


def _manual_placement(points) -> NodePlacement:
    pos = np.asarray(points, dtype=float)
    return NodePlacement(n_nodes=pos.shape[0], positions=pos, seed=None)


class TestChannelParams:
    def test_db_conversion(self):
        assert db_to_linear(10.0) == pytest.approx(10.0)
        assert db_to_linear(0.0) == pytest.approx(1.0)
        assert db_to_linear(3.0) == pytest.approx(1.9952623)

    def test_default_G(self):
        assert ChannelParams(alpha=4, gamma=10).G == pytest.approx(1e-6)
        assert ChannelParams(alpha=2, gamma=10).G == pytest.approx(1e-3)

    def test_validation(self):
        with pytest.raises(ValueError):
            ChannelParams(alpha=1.5, gamma=10)
        with pytest.raises(ValueError):
            ChannelParams(alpha=2, gamma=0)
        with pytest.raises(ValueError):
            ChannelParams(alpha=2, gamma=1, phase_mode="coherent")

    def test_power_assignment_rejects_negative(self):
        with pytest.raises(ValueError):
            PowerAssignment(slot=1, kind="node", powers={0: -1.0})
        with pytest.raises(ValueError):
            PowerAssignment(slot=1, kind="relay", powers={0: 1.0})


class TestGainMagnitude:
    def test_hand_value(self):
        params = ChannelParams(alpha=4, gamma=10, G=1e-6)
        assert gain_magnitude(params, 0.1) == pytest.approx(0.1)

    def test_unit_distance(self):
        params = ChannelParams(alpha=3, gamma=2, G=0.04)
        assert gain_magnitude(params, 1.0) == pytest.approx(0.2)

    def test_monotone_in_distance(self):
        params = ChannelParams(alpha=4, gamma=10)
        d = np.linspace(0.01, 1.4, 100)
        g = [gain_magnitude(params, x) for x in d]
        assert all(a > b for a, b in zip(g, g[1:]))

    def test_zero_distance_rejected(self):
        with pytest.raises(ValueError):
            gain_magnitude(ChannelParams(alpha=2, gamma=1), 0.0)


class TestNodeNeighborhood:
    def test_boundary_power_is_included(self):
        p = _manual_placement([(0.1, 0.1), (0.6, 0.1)])
        params = ChannelParams(alpha=4, gamma=10)
        exact = params.power_factor * 0.5 ** 4
        assert node_neighborhood(params, p, {1: exact}, 0) == {1}
        assert node_neighborhood(params, p, {1: exact * (1 - 1e-9)}, 0) == set()

    def test_zero_powers_give_empty_set(self):
        p = place_nodes(20, 0)
        params = ChannelParams(alpha=2, gamma=1)
        assert node_neighborhood(params, p, {m: 0.0 for m in range(20)}, 3) == set()

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        for seed in range(10):
            p = place_nodes(50, seed)
            params = ChannelParams(alpha=2 + 2 * rng.random(), gamma=1 + rng.random())
            powers = {m: float(v) for m, v in
                      enumerate(rng.random(50) * 5 * params.power_factor)}
            for n in range(50):
                want = oracles.brute_node_neighborhood(
                    params.alpha, params.G, params.gamma, p.positions, powers, n)
                assert node_neighborhood(params, p, powers, n) == want


class TestClusterReceivedPower:
    def test_singleton_reduces_to_node_power(self):
        p = place_nodes(10, 2)
        powers = {3: 2.5}
        for mode in ("fixed", "uniform"):
            params = ChannelParams(alpha=3, gamma=2, phase_mode=mode)
            got = cluster_received_power(params, p, {3}, powers, 7)
            want = params.G * p.distances[3, 7] ** -3 * 2.5
            assert got == pytest.approx(want)

    def test_two_equidistant_members_coherent_gain(self):
        # both members at distance 0.3 from the receiver, equal power
        p = _manual_placement([(0.5, 0.5), (0.2, 0.5), (0.8, 0.5)])
        powers = {1: 1.0, 2: 1.0}
        single = {1: 1.0}
        fixed = ChannelParams(alpha=4, gamma=10, phase_mode="fixed")
        uniform = ChannelParams(alpha=4, gamma=10, phase_mode="uniform")
        base = cluster_received_power(fixed, p, {1}, single, 0)
        assert cluster_received_power(fixed, p, {1, 2}, powers, 0) == pytest.approx(4 * base)
        assert cluster_received_power(uniform, p, {1, 2}, powers, 0) == pytest.approx(2 * base)

    def test_fixed_phase_dominates_uniform(self):
        rng = np.random.default_rng(3)
        for seed in range(10):
            p = place_nodes(12, seed)
            powers = {m: float(v) for m, v in enumerate(rng.random(12))}
            cluster = set(rng.choice(11, size=4, replace=False).tolist())
            fixed = ChannelParams(alpha=3, gamma=1, phase_mode="fixed")
            uniform = ChannelParams(alpha=3, gamma=1, phase_mode="uniform")
            assert (cluster_received_power(fixed, p, cluster, powers, 11)
                    >= cluster_received_power(uniform, p, cluster, powers, 11))

    def test_receiver_inside_cluster_rejected(self):
        p = place_nodes(5, 0)
        params = ChannelParams(alpha=2, gamma=1)
        with pytest.raises(ValueError):
            cluster_received_power(params, p, {0, 1}, {0: 1.0, 1: 1.0}, 1)


class TestClusterNeighborhood:
    def test_zero_powers_empty(self):
        p = place_nodes(16, 0)
        params = ChannelParams(alpha=2, gamma=1)
        clusters = {0: {0, 1}, 1: {2, 3}}
        powers = {m: 0.0 for m in range(4)}
        assert cluster_neighborhood(params, p, clusters, powers, 8) == set()

    def test_singleton_clusters_agree_with_node_neighborhood(self):
        rng = np.random.default_rng(4)
        p = place_nodes(20, 1)
        params = ChannelParams(alpha=2, gamma=1)
        powers = {m: float(v) for m, v in
                  enumerate(rng.random(20) * 3 * params.power_factor)}
        clusters = {m: {m} for m in range(20)}
        for n in range(20):
            assert (cluster_neighborhood(params, p, clusters, powers, n)
                    == node_neighborhood(params, p, powers, n))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        for seed in range(10):
            p = place_nodes(32, seed)
            mode = "fixed" if seed % 2 == 0 else "uniform"
            params = ChannelParams(alpha=2 + 2 * rng.random(),
                                   gamma=1 + rng.random(), phase_mode=mode)
            powers = {m: float(v) for m, v in
                      enumerate(rng.random(32) * params.power_factor)}
            ids = rng.permutation(32)
            clusters = {c: set(ids[c::4].tolist()) for c in range(4)}
            for n in range(32):
                want = oracles.brute_cluster_neighborhood(
                    params.alpha, params.G, params.gamma, p.positions,
                    clusters, powers, n, mode)
                assert cluster_neighborhood(params, p, clusters, powers, n) == want

    def test_fixed_phase_neighborhood_contains_uniform(self):
        rng = np.random.default_rng(6)
        p = place_nodes(24, 2)
        powers = {m: float(v) for m, v in enumerate(rng.random(24) * 1e5)}
        clusters = {c: set(range(c * 6, (c + 1) * 6)) for c in range(4)}
        fixed = ChannelParams(alpha=3, gamma=5, phase_mode="fixed")
        uniform = ChannelParams(alpha=3, gamma=5, phase_mode="uniform")
        for n in range(24):
            assert (cluster_neighborhood(fixed, p, clusters, powers, n)
                    >= cluster_neighborhood(uniform, p, clusters, powers, n))


class TestClusterOfCluster:
    def test_singleton_receiver_cluster(self):
        rng = np.random.default_rng(7)
        p = place_nodes(16, 3)
        params = ChannelParams(alpha=2, gamma=1)
        powers = {m: float(v) for m, v in
                  enumerate(rng.random(16) * params.power_factor)}
        clusters = {0: {0}, 1: {1, 2, 3}, 2: {4, 5}}
        assert (cluster_of_cluster_neighborhood(params, p, clusters, powers, 0)
                == cluster_neighborhood(params, p, clusters, powers, 0))

    def test_monotone_in_receiver_cluster(self):
        rng = np.random.default_rng(8)
        p = place_nodes(16, 4)
        params = ChannelParams(alpha=2, gamma=1)
        powers = {m: float(v) for m, v in
                  enumerate(rng.random(16) * params.power_factor)}
        small = {0: {0, 1}, 1: {4, 5, 6}}
        large = {0: {0, 1, 2}, 1: {4, 5, 6}}
        assert (cluster_of_cluster_neighborhood(params, p, large, powers, 0)
                >= cluster_of_cluster_neighborhood(params, p, small, powers, 0))

    def test_matches_brute_force(self):
        rng = np.random.default_rng(9)
        for seed in range(10):
            p = place_nodes(32, seed + 20)
            mode = "fixed" if seed % 2 == 0 else "uniform"
            params = ChannelParams(alpha=3, gamma=2, phase_mode=mode)
            powers = {m: float(v) for m, v in
                      enumerate(rng.random(32) * 2 * params.power_factor)}
            ids = rng.permutation(32)
            clusters = {c: set(ids[c::4].tolist()) for c in range(4)}
            for cid in clusters:
                want = oracles.brute_cluster_of_cluster(
                    params.alpha, params.G, params.gamma, p.positions,
                    clusters, powers, cid, mode)
                got = cluster_of_cluster_neighborhood(params, p, clusters,
                                                      powers, cid)
                assert got == want


class TestMinBroadcastPower:
    def test_hand_value(self):
        p = _manual_placement([(0.1, 0.5), (0.6, 0.5)])
        params = ChannelParams(alpha=2, gamma=4, G=0.5)
        assert min_broadcast_power_node(params, p, 0, {1}) == pytest.approx(
            (4 / 0.5) * 0.25)

    def test_self_only_target_costs_nothing(self):
        p = place_nodes(5, 0)
        params = ChannelParams(alpha=2, gamma=1)
        assert min_broadcast_power_node(params, p, 2, {2}) == 0.0

    def test_boundary_tightness(self):
        p = place_nodes(20, 6)
        params = ChannelParams(alpha=4, gamma=10)
        targets = set(range(10))
        power = min_broadcast_power_node(params, p, 15, targets)
        for n in targets:
            assert 15 in node_neighborhood(params, p, {15: power}, n)
        missed = [n for n in targets
                  if 15 not in node_neighborhood(params, p, {15: power * (1 - 1e-9)}, n)]
        assert missed  # the farthest target drops out just below the minimum

    def test_empty_targets_rejected(self):
        p = place_nodes(5, 0)
        with pytest.raises(ValueError):
            min_broadcast_power_node(ChannelParams(alpha=2, gamma=1), p, 0, set())


class TestMinCooperativePower:
    def test_equidistant_ring_hand_values(self):
        # 4 members on a circle of radius 0.2 around the receiver
        receiver = np.array([0.5, 0.5])
        angles = np.linspace(0, 2 * np.pi, 4, endpoint=False)
        members = receiver + 0.2 * np.column_stack([np.cos(angles), np.sin(angles)])
        p = _manual_placement(np.vstack([receiver, members]))
        for mode, scale in (("fixed", 16), ("uniform", 4)):
            params = ChannelParams(alpha=4, gamma=10, phase_mode=mode)
            got = min_cooperative_power_cluster(params, p, {1, 2, 3, 4}, {0})
            want = params.gamma * 0.2 ** 4 / (params.G * scale)
            assert got == pytest.approx(want)

    def test_singleton_cluster_reduces_to_broadcast(self):
        p = place_nodes(12, 7)
        for mode in ("fixed", "uniform"):
            params = ChannelParams(alpha=3, gamma=2, phase_mode=mode)
            got = min_cooperative_power_cluster(params, p, {4}, {9})
            assert got == pytest.approx(min_broadcast_power_node(params, p, 4, {9}))

    def test_boundary_tightness_at_worst_receiver(self):
        p = place_nodes(20, 8)
        cluster = {0, 1, 2}
        receivers = set(range(3, 12))
        for mode in ("fixed", "uniform"):
            params = ChannelParams(alpha=4, gamma=10, phase_mode=mode)
            power = min_cooperative_power_cluster(params, p, cluster, receivers)
            powers = {m: power for m in cluster}
            rx = [cluster_received_power(params, p, cluster, powers, n)
                  for n in receivers]
            assert min(rx) >= params.gamma
            assert min(rx) == pytest.approx(params.gamma)

    def test_receivers_inside_cluster_rejected(self):
        p = place_nodes(6, 0)
        params = ChannelParams(alpha=2, gamma=1)
        with pytest.raises(ValueError):
            min_cooperative_power_cluster(params, p, {0, 1}, {0, 1})
