"""Random node placements, geometry queries, and the 4-ary cell hierarchy.

Nodes live in the unit square. The hierarchy recursively splits the square
into four equal cells per level; grid cells are half-open ``[lo, hi)`` in
each axis (the topmost row/column closes at 1.0) so every point belongs to
exactly one cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class NodePlacement:
    """Immutable set of node positions in the unit square."""

    n_nodes: int
    positions: np.ndarray  # shape (N, 2)
    seed: object

    def __post_init__(self) -> None:
        self.positions.setflags(write=False)

    @cached_property
    def distances(self) -> np.ndarray:
        """Full pairwise Euclidean distance matrix (N x N, zero diagonal)."""
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        d = np.sqrt((diff * diff).sum(axis=2))
        d.setflags(write=False)
        return d

    def to_csv(self, path) -> None:
        ids = np.arange(self.n_nodes)
        rows = np.column_stack([ids, self.positions])
        np.savetxt(path, rows, fmt=["%d", "%.17g", "%.17g"], delimiter=",",
                   header="node_id,x,y", comments="")

    @classmethod
    def from_csv(cls, path) -> "NodePlacement":
        rows = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        pos = rows[np.argsort(rows[:, 0]), 1:3].copy()
        return cls(n_nodes=pos.shape[0], positions=pos, seed=None)


def _resample_collisions(pos: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Redraw any exactly-coincident points until all rows are distinct."""
    while True:
        order = np.lexsort((pos[:, 1], pos[:, 0]))
        dup = np.all(pos[order[1:]] == pos[order[:-1]], axis=1)
        if not dup.any():
            return pos
        pos[order[1:][dup]] = rng.random((int(dup.sum()), 2))


def place_nodes(n_nodes: int, seed) -> NodePlacement:
    """Draw ``n_nodes`` i.i.d. uniform positions in the unit square.

    Deterministic in ``seed`` (anything accepted by
    ``numpy.random.default_rng``). Exact position collisions are resampled.
    """
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    rng = np.random.default_rng(seed)
    pos = _resample_collisions(rng.random((n_nodes, 2)), rng)
    return NodePlacement(n_nodes=n_nodes, positions=pos, seed=seed)


def place_nodes_from_rng(n_nodes: int, rng: np.random.Generator) -> NodePlacement:
    """Like :func:`place_nodes` but consuming an existing RNG stream."""
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    pos = _resample_collisions(rng.random((n_nodes, 2)), rng)
    return NodePlacement(n_nodes=n_nodes, positions=pos, seed=None)


# ---------------------------------------------------------------------------
# regions


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned rectangle, half-open on the upper edges.

    An upper edge that sits exactly at 1.0 is closed, so a grid of these
    rectangles partitions the unit square.
    """

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.x0 < self.x1 <= 1.0 and 0.0 <= self.y0 < self.y1 <= 1.0):
            raise ValueError("rectangle must lie inside the unit square with positive area")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, points: np.ndarray) -> np.ndarray:
        x, y = points[:, 0], points[:, 1]
        in_x = (x >= self.x0) & ((x < self.x1) | (self.x1 == 1.0) & (x <= 1.0))
        in_y = (y >= self.y0) & ((y < self.y1) | (self.y1 == 1.0) & (y <= 1.0))
        return in_x & in_y


@dataclass(frozen=True)
class DiscRegion:
    """Closed disc inside the unit square."""

    cx: float
    cy: float
    radius: float

    def __post_init__(self) -> None:
        r = self.radius
        if r <= 0:
            raise ValueError("radius must be positive")
        if not (r <= self.cx <= 1 - r and r <= self.cy <= 1 - r):
            raise ValueError("disc must lie inside the unit square")

    @property
    def area(self) -> float:
        return math.pi * self.radius ** 2

    def contains(self, points: np.ndarray) -> np.ndarray:
        dx = points[:, 0] - self.cx
        dy = points[:, 1] - self.cy
        return dx * dx + dy * dy <= self.radius ** 2


def count_in_region(placement: NodePlacement, region) -> int:
    """Exact number of placed nodes inside ``region``."""
    return int(region.contains(placement.positions).sum())


def nearest_neighbor_distance(placement: NodePlacement, node: int) -> float:
    """Distance from ``node`` to its closest other node (strictly positive)."""
    d = placement.distances[node].copy()
    d[node] = np.inf
    return float(d.min())


# ---------------------------------------------------------------------------
# hierarchy


@dataclass(frozen=True)
class HierarchyPartition:
    """Recursive 4-ary partition of the unit square over levels 1..T.

    Level ``t`` is a ``2^(T-t) x 2^(T-t)`` grid of square cells of side
    ``2^(t-T)``; level ``T`` is the whole square. Cell ids at level ``t``
    are ``j * 2^(T-t) + k`` where ``j`` indexes x and ``k`` indexes y.
    Empty cells are retained.
    """

    placement: NodePlacement
    kappa: float
    n_levels: int
    cell_ids: tuple  # cell_ids[t-1]: int array of length N

    def grid_side(self, level: int) -> int:
        return 2 ** (self.n_levels - level)

    def cell_side(self, level: int) -> float:
        return 2.0 ** (level - self.n_levels)

    def max_diameter(self, level: int) -> float:
        """Largest possible within-cell distance: sqrt(2) * 4^((t-T)/2)."""
        return math.sqrt(2.0) * 2.0 ** (level - self.n_levels)

    def n_cells(self, level: int) -> int:
        return self.grid_side(level) ** 2

    def cells(self, level: int) -> list:
        """Node-id arrays for every cell at ``level`` (empties included)."""
        ids = self.cell_ids[level - 1]
        order = np.argsort(ids, kind="stable")
        sorted_ids = ids[order]
        bounds = np.searchsorted(sorted_ids, np.arange(self.n_cells(level) + 1))
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.n_cells(level))]

    def cell_members(self, level: int, cell: int) -> np.ndarray:
        return np.nonzero(self.cell_ids[level - 1] == cell)[0]

    def parent_cell(self, level: int, cell: int) -> int:
        """Id of the level ``level+1`` cell containing ``cell``."""
        side = self.grid_side(level)
        j, k = divmod(cell, side)
        return (j // 2) * (side // 2) + (k // 2)


def hierarchy_levels(n_nodes: int, kappa: float) -> int:
    """Number of hierarchy levels T = ceil(log4 N^(1-kappa))."""
    if not 0 < kappa < 1:
        raise ValueError(f"kappa must be in (0, 1), got {kappa}")
    raw = (1.0 - kappa) * math.log(n_nodes) / math.log(4.0)
    return max(1, math.ceil(raw - 1e-12))


def build_hierarchy(placement: NodePlacement, kappa: float) -> HierarchyPartition:
    """Assign every node to a cell at each level 1..T."""
    n_levels = hierarchy_levels(placement.n_nodes, kappa)
    cell_ids = []
    for t in range(1, n_levels + 1):
        side = 2 ** (n_levels - t)
        jk = np.minimum((placement.positions * side).astype(np.int64), side - 1)
        cell_ids.append(jk[:, 0] * side + jk[:, 1])
    return HierarchyPartition(placement=placement, kappa=kappa,
                              n_levels=n_levels, cell_ids=tuple(cell_ids))


# ---------------------------------------------------------------------------
# gossip graph


def gossip_radius(n_nodes: int, c: float = 4.0) -> float:
    """Connectivity radius sqrt(c * ln N / N) used by the gossip algorithms."""
    if n_nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {n_nodes}")
    return math.sqrt(c * math.log(n_nodes) / n_nodes)


def geometric_graph(placement: NodePlacement, radius: float) -> sparse.csr_matrix:
    """Symmetric adjacency of the geometric graph at ``radius`` (CSR, bool)."""
    tree = cKDTree(placement.positions)
    pairs = tree.query_pairs(radius, output_type="ndarray")
    n = placement.n_nodes
    if pairs.size == 0:
        return sparse.csr_matrix((n, n), dtype=bool)
    rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
    cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
    adj = sparse.csr_matrix((np.ones(rows.size, bool), (rows, cols)), shape=(n, n))
    adj.sort_indices()
    return adj


def is_connected(adjacency: sparse.csr_matrix) -> bool:
    n_comp, _ = connected_components(adjacency, directed=False)
    return n_comp == 1


def connected_placement(n_nodes: int, rng: np.random.Generator,
                        radius_c: float = 4.0, max_resamples: int = 100):
    """Draw placements until the gossip-radius graph is connected.

    Returns ``(placement, adjacency, resamples)``. Raises ``RuntimeError``
    after ``max_resamples`` failed draws.
    """
    radius = gossip_radius(n_nodes, radius_c)
    for attempt in range(max_resamples + 1):
        placement = place_nodes_from_rng(n_nodes, rng)
        adjacency = geometric_graph(placement, radius)
        if is_connected(adjacency):
            return placement, adjacency, attempt
    raise RuntimeError(
        f"no connected placement in {max_resamples} resamples (N={n_nodes})")
