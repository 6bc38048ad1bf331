"""Deterministic random streams.

Every stochastic operation in the package draws from a Philox counter-based
generator keyed by an explicit 64-bit seed plus a small channel tag, so the
same (seed, channel) pair always reproduces the same draws regardless of what
other operations ran before.
"""

from __future__ import annotations

import numpy as np

from .errors import UsageError

# channel tags, one per kind of stochastic operation
ATOMS = 0
MASSES = 1
ALLOCATION = 2
SPARSIFY = 3
PACKING = 4
PROBE = 5


def stream(seed: int, channel: int = ATOMS) -> np.random.Generator:
    """Return a fresh generator for (seed, channel)."""
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise UsageError(f"seed must be an integer, got {seed!r}")
    if seed < 0 or seed > 2**64 - 1:
        raise UsageError(f"seed must fit in 64 bits, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(channel),))
    return np.random.Generator(np.random.Philox(ss))
