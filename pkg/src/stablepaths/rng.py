"""Reproducible, splittable random-number streams.

All randomness in the package flows through counter-based Philox generators
derived from a single 64-bit master seed.  Streams for independent tasks are
split off with ``SeedSequence.spawn`` semantics keyed by a label path, so
ensembles can be fanned out (or reordered) without changing any stream.
"""

from __future__ import annotations

import numpy as np


def master_sequence(seed: int) -> np.random.SeedSequence:
    if not 0 <= int(seed) < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.SeedSequence(int(seed))


def derive(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *path)``.

    The same (seed, path) always yields the same stream, independent of any
    other stream that was or was not created.
    """
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))
