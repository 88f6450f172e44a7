"""Seedable random streams.

Every random draw in the package comes from a PCG64 generator seeded by
``SeedSequence(entropy=seed, spawn_key=path)``. The first element of the
path names the consumer, so streams for different purposes never coincide
even when they share a master seed:

    (NOISE_TERM, i)       noise term ``i`` of a NoiseSpec
    (NOISE_SELECT,)       component selector for probabilistic mixtures
    (BOOTSTRAP_ROW, b)    bootstrap replicate row ``b``

Children are addressed by index rather than spawned in order, so any row can
be regenerated on its own and parallel evaluation is order independent.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

NOISE_TERM = 0
NOISE_SELECT = 1
BOOTSTRAP_ROW = 2

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ParameterError(f"seed must be an integer, got {seed!r}", "seed")
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ParameterError(f"seed must lie in [0, 2**64 - 1], got {seed}", "seed")
    return seed


def stream(seed: int, *path: int) -> np.random.Generator:
    """Generator for the child stream at ``path`` under master ``seed``."""
    ss = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))
