"""Deterministic random streams.

Every stochastic quantity in a run is drawn from a Philox generator keyed by
(seed, purpose, index). Philox is counter-based, so streams are independent by
key and results do not depend on the order in which trials execute.
"""

import numpy as np

# purpose ids; keep stable, they are part of the reproducibility contract
DATA_USER1 = 1
DATA_USER2 = 2
CHANNEL = 3
NOISE = 4
THEOREM = 5
ORACLE = 6


def make_rng(seed: int, purpose: int, index: int = 0) -> np.random.Generator:
    """Generator for one (purpose, index) stream of a master seed."""
    if not 0 <= int(seed) < 2**64:
        raise ValueError("seed must fit in uint64")
    key = np.array([np.uint64(seed), np.uint64((purpose << 40) ^ index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def crandn(rng: np.random.Generator, shape, var: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian, total variance `var` per entry."""
    z = rng.standard_normal(size=shape + (2,))
    return np.sqrt(var / 2.0) * (z[..., 0] + 1j * z[..., 1])
