"""Frequency-slot counting via two-hop conflict graphs and greedy coloring.

Per time slot, transmitters that can interfere at a common receiver must use
distinct frequency slots; this is enforced by coloring the square of the
one-hop conflict graph. The chromatic number itself is NP-hard, so the
per-slot count uses deterministic greedy coloring (descending degree, ties
by vertex id), which respects the Brooks-style upper bound maxdeg + 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping


@dataclass
class ConflictGraph:
    """Undirected graph over transmitter ids; no self-loops."""

    vertices: tuple
    adj: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for v in self.vertices:
            self.adj.setdefault(v, set())

    def add_edge(self, u, v) -> None:
        if u == v:
            return
        self.adj[u].add(v)
        self.adj[v].add(u)

    def degree(self, v) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(s) for s in self.adj.values()), default=0)

    def edges(self) -> set:
        return {frozenset((u, v)) for u, nbrs in self.adj.items() for v in nbrs}


def build_one_hop_graph(neighborhoods: Mapping) -> ConflictGraph:
    """Symmetrized conflict graph from per-transmitter neighborhoods.

    ``neighborhoods`` maps each active transmitter to the set of active
    transmitters it hears; edge {i, j} exists iff either hears the other.
    """
    vertices = tuple(sorted(neighborhoods))
    g = ConflictGraph(vertices)
    vset = set(vertices)
    for i, nbrs in neighborhoods.items():
        for j in nbrs:
            if j in vset:
                g.add_edge(i, j)
    return g


def two_hop_square(g: ConflictGraph) -> ConflictGraph:
    """Graph joining vertices at distance 1 or 2 in ``g``."""
    g2 = ConflictGraph(g.vertices)
    for u in g.vertices:
        reach = set(g.adj[u])
        for v in g.adj[u]:
            reach |= g.adj[v]
        reach.discard(u)
        for v in reach:
            g2.add_edge(u, v)
    return g2


def greedy_coloring(g: ConflictGraph) -> dict:
    """Greedy proper coloring; vertices in descending degree, ties by id."""
    order = sorted(g.vertices, key=lambda v: (-g.degree(v), v))
    colors = {}
    for v in order:
        used = {colors[w] for w in g.adj[v] if w in colors}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    return colors


def greedy_color(g: ConflictGraph) -> int:
    """Number of colors greedy coloring uses on ``g`` (0 for no vertices)."""
    if not g.vertices:
        return 0
    colors = greedy_coloring(g)
    return max(colors.values()) + 1


def slot_bandwidth(neighborhoods: Mapping) -> int:
    """Frequency slots needed for one time slot's transmitters."""
    return greedy_color(two_hop_square(build_one_hop_graph(neighborhoods)))


def coloring_bounds(neighborhoods: Mapping) -> tuple:
    """(lower, upper) sandwich for B(t): max in-neighborhood, maxdeg(G2)+1."""
    g = build_one_hop_graph(neighborhoods)
    g2 = two_hop_square(g)
    vset = set(g.vertices)
    lower = max((len(set(nbrs) & vset - {i}) for i, nbrs in neighborhoods.items()),
                default=0)
    upper = g2.max_degree() + 1 if g.vertices else 0
    return lower, upper
