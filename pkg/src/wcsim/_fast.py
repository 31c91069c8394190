"""Numba kernels for the per-slot inner loops.

These mirror the reference implementations in :mod:`wcsim.spectrum` and
:mod:`wcsim.consensus` (greedy two-hop coloring, induced subgraphs, random
maximal matching); equivalence is covered by tests. Graphs are CSR
(indptr/indices) with symmetric adjacency and sorted indices.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def color_two_hop(indptr, indices, n):
    """Greedy-color the square of a one-hop CSR graph.

    Vertex order: descending two-hop degree, ties by ascending id. Returns
    (n_colors, colors, max_deg2, proper) where ``proper`` confirms no two
    vertices within two hops share a color.
    """
    if n == 0:
        return 0, np.empty(0, np.int64), 0, True
    deg2 = np.zeros(n, np.int64)
    stamp = np.full(n, -1, np.int64)
    for i in range(n):
        cnt = 0
        for jj in range(indptr[i], indptr[i + 1]):
            j = indices[jj]
            if j != i and stamp[j] != i:
                stamp[j] = i
                cnt += 1
            for kk in range(indptr[j], indptr[j + 1]):
                k = indices[kk]
                if k != i and stamp[k] != i:
                    stamp[k] = i
                    cnt += 1
        deg2[i] = cnt

    # sort key: primary deg2 descending, secondary id ascending
    key = deg2 * np.int64(n) + (np.int64(n) - 1 - np.arange(n, dtype=np.int64))
    order = np.argsort(-key)

    colors = np.full(n, -1, np.int64)
    used = np.full(n + 1, -1, np.int64)  # used[c] == v: color c blocked for v
    for oi in range(n):
        v = order[oi]
        for jj in range(indptr[v], indptr[v + 1]):
            j = indices[jj]
            if j != v and colors[j] >= 0:
                used[colors[j]] = v
            for kk in range(indptr[j], indptr[j + 1]):
                k = indices[kk]
                if k != v and colors[k] >= 0:
                    used[colors[k]] = v
        c = 0
        while used[c] == v:
            c += 1
        colors[v] = c

    proper = True
    for v in range(n):
        for jj in range(indptr[v], indptr[v + 1]):
            j = indices[jj]
            if j != v and colors[j] == colors[v]:
                proper = False
            for kk in range(indptr[j], indptr[j + 1]):
                k = indices[kk]
                if k != v and colors[k] == colors[v]:
                    proper = False

    n_colors = colors.max() + 1
    return n_colors, colors, deg2.max(), proper


@njit(cache=True)
def induced_subgraph(indptr, indices, sub):
    """CSR of the subgraph induced by sorted node ids ``sub`` (local ids)."""
    n = indptr.shape[0] - 1
    local = np.full(n, -1, np.int64)
    for i in range(sub.shape[0]):
        local[sub[i]] = i
    m = sub.shape[0]
    new_indptr = np.zeros(m + 1, np.int64)
    total = 0
    for i in range(m):
        g = sub[i]
        for jj in range(indptr[g], indptr[g + 1]):
            if local[indices[jj]] >= 0:
                total += 1
        new_indptr[i + 1] = total
    new_indices = np.empty(total, np.int64)
    pos = 0
    for i in range(m):
        g = sub[i]
        for jj in range(indptr[g], indptr[g + 1]):
            lj = local[indices[jj]]
            if lj >= 0:
                new_indices[pos] = lj
                pos += 1
    return new_indptr, new_indices


@njit(cache=True)
def greedy_matching(indptr, indices, perm, randu):
    """Random maximal matching: visit nodes in ``perm`` order, each unmatched
    node pairing with a uniformly chosen unmatched neighbor (via ``randu``).

    Returns (pair_a, pair_b) arrays of matched endpoints.
    """
    n = perm.shape[0]
    matched = np.full(n, -1, np.int64)
    pair_a = np.empty(n // 2, np.int64)
    pair_b = np.empty(n // 2, np.int64)
    cnt = 0
    for pi in range(n):
        u = perm[pi]
        if matched[u] >= 0:
            continue
        avail = 0
        for jj in range(indptr[u], indptr[u + 1]):
            if matched[indices[jj]] < 0:
                avail += 1
        if avail == 0:
            continue
        pick = int(randu[u] * avail)
        if pick >= avail:
            pick = avail - 1
        for jj in range(indptr[u], indptr[u + 1]):
            v = indices[jj]
            if matched[v] < 0:
                if pick == 0:
                    matched[u] = v
                    matched[v] = u
                    pair_a[cnt] = u
                    pair_b[cnt] = v
                    cnt += 1
                    break
                pick -= 1
    return pair_a[:cnt], pair_b[:cnt]
