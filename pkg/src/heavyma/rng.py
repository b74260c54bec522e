"""Counter-based random streams keyed by integer tuples.

Each stream is a Philox generator seeded from ``SeedSequence((seed, *key))``,
so replications can be generated in any order or in parallel with identical
results.
"""
from __future__ import annotations

from enum import IntEnum

import numpy as np


class Tag(IntEnum):
    INNOVATIONS = 1
    COEFFICIENTS = 2
    POINTS = 3
    LIMIT_COEFFICIENTS = 4
    BOOTSTRAP = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``; all entries must be >= 0."""
    entropy = [int(seed), *(int(k) for k in key)]
    if any(e < 0 for e in entropy):
        raise ValueError("seed and stream keys must be non-negative")
    # SeedSequence ignores trailing zeros, so (s, 1) and (s, 1, 0) would
    # collide without a non-zero length marker
    entropy.append(len(key) + 1)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
