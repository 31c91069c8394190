"""Reproducible RNG substreams for the (algorithm, N, trial) grid.

Each purpose gets its own PCG64 stream keyed through a SeedSequence spawn
key, so distinct tuples never collide and runs are independent of execution
order.
"""

from __future__ import annotations

import numpy as np

ALGORITHMS = ("randomized", "path", "hierarchical", "qconsensus", "qhierarchical")
PURPOSES = ("placement", "init", "matching", "pairs", "dither", "coin")

_ALGORITHM_IDS = {name: i for i, name in enumerate(ALGORITHMS)}
_PURPOSE_IDS = {name: i for i, name in enumerate(PURPOSES)}


def derive_stream(master_seed: int, algorithm: str, n: int, trial: int,
                  purpose: str) -> np.random.Generator:
    """Independent, reproducible substream for one run and purpose."""
    key = (_ALGORITHM_IDS[algorithm], int(n), int(trial), _PURPOSE_IDS[purpose])
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))
