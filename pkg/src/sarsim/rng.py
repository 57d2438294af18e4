"""Named random streams.

Every consumer of randomness draws from its own PCG64 stream derived from
``SeedSequence(seed, spawn_key=(stream,))``; adding draws to one stream never
perturbs another.
"""

import numpy as np

TOPOLOGY = 0
PORA = 1
RSP = 2
GROUP_BASE = 10  # workload group g uses stream GROUP_BASE + g


def stream(seed: int, key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(key,))))
