"""Reproducible random-number streams for parallel ensembles.

Every stochastic object in this package is drawn from a counter-based
generator keyed by (seed, stream).  Distinct keys give statistically
independent streams, and the key -> stream mapping is pure, so ensemble
members can be sampled in any order, in chunks, or in parallel without
changing a single draw.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Return the generator for stream `stream` of master seed `seed`."""
    key = np.array([seed & _MASK64, stream & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def substream_seed(master_seed: int, index: int) -> int:
    """Derive the 64-bit seed of ensemble member `index` from a master seed.

    Uses SeedSequence spawn keys, so the derivation is independent of the
    order in which members are instantiated.
    """
    ss = np.random.SeedSequence(entropy=master_seed & _MASK64, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
