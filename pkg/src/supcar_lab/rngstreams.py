"""Counter-based random streams keyed by (master seed, index path).

Each worker task derives its own generator from the master seed and its
task indices, so results never depend on scheduling or worker count.
"""

from __future__ import annotations

import numpy as np


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the task addressed by ``key``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
