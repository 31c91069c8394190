"""Independent brute-force oracles used to cross-check the fast paths.

Everything here is written from the definitions with plain loops and no
shared code with the implementation modules, so tests can compare the two
routes on random instances.
"""

from __future__ import annotations

import itertools
import math


def brute_node_neighborhood(alpha, G, gamma, positions, powers, n):
    """Receivable transmitters at node n, straight from the power threshold."""
    out = set()
    for m, p in powers.items():
        if m == n:
            continue
        dx = positions[m][0] - positions[n][0]
        dy = positions[m][1] - positions[n][1]
        d = math.sqrt(dx * dx + dy * dy)
        if p >= (gamma / G) * d ** alpha:
            out.add(m)
    return out


def brute_cluster_received_power(alpha, G, positions, cluster, powers, n,
                                 phase_mode):
    if phase_mode == "fixed":
        amp = 0.0
        for m in cluster:
            dx = positions[m][0] - positions[n][0]
            dy = positions[m][1] - positions[n][1]
            d = math.sqrt(dx * dx + dy * dy)
            amp += d ** (-alpha / 2.0) * math.sqrt(powers[m])
        return G * amp * amp
    total = 0.0
    for m in cluster:
        dx = positions[m][0] - positions[n][0]
        dy = positions[m][1] - positions[n][1]
        d = math.sqrt(dx * dx + dy * dy)
        total += d ** (-alpha) * powers[m]
    return G * total


def brute_cluster_neighborhood(alpha, G, gamma, positions, clusters, powers,
                               n, phase_mode):
    out = set()
    for cid, members in clusters.items():
        if not members or n in members:
            continue
        rx = brute_cluster_received_power(alpha, G, positions, members, powers,
                                          n, phase_mode)
        if rx >= gamma:
            out.add(cid)
    return out


def brute_cluster_of_cluster(alpha, G, gamma, positions, clusters, powers,
                             receiver, phase_mode):
    out = set()
    for n in clusters[receiver]:
        out |= brute_cluster_neighborhood(alpha, G, gamma, positions, clusters,
                                          powers, n, phase_mode)
    return out


# ---------------------------------------------------------------------------
# graphs


def bfs_distances(adj: dict, source) -> dict:
    """Hop counts from source over an adjacency dict of sets."""
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return dist


def bfs_two_hop(adj: dict) -> dict:
    """Two-hop adjacency (distance 1 or 2) via per-vertex BFS."""
    out = {v: set() for v in adj}
    for v in adj:
        dist = bfs_distances(adj, v)
        out[v] = {w for w, d in dist.items() if 1 <= d <= 2}
    return out


def exact_chromatic(adj: dict) -> int:
    """Chromatic number by exhaustive backtracking (small graphs only)."""
    vertices = sorted(adj, key=lambda v: (-len(adj[v]), v))
    if not vertices:
        return 0
    if not any(adj.values()):
        return 1

    def colorable(k):
        colors = {}

        def place(i):
            if i == len(vertices):
                return True
            v = vertices[i]
            used = {colors[w] for w in adj[v] if w in colors}
            for c in range(k):
                if c not in used:
                    colors[v] = c
                    if place(i + 1):
                        return True
                    del colors[v]
                if c not in colors.values():
                    break  # symmetry: first unused color only needs one try
            return False

        return place(0)

    for k in itertools.count(2):
        if colorable(k):
            return k


def connected_by_union_find(positions, radius) -> bool:
    """Single-component check of the geometric graph, via union-find."""
    n = len(positions)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    r2 = radius * radius
    for i in range(n):
        for j in range(i + 1, n):
            dx = positions[i][0] - positions[j][0]
            dy = positions[i][1] - positions[j][1]
            if dx * dx + dy * dy <= r2:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    root = find(0)
    return all(find(i) == root for i in range(n))


def random_graph(n, p, rng) -> dict:
    """Erdos-Renyi adjacency dict."""
    adj = {v: set() for v in range(n)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                adj[i].add(j)
                adj[j].add(i)
    return adj
