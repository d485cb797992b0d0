"""Deterministic derivation of independent RNG streams.

Every random draw in the package comes from a numpy Generator built
here from (seed, *path) so that runs are reproducible and streams for
different purposes never alias.
"""

from __future__ import annotations

import zlib

import numpy as np


def _token_int(token) -> int:
    if isinstance(token, (int, np.integer)):
        return int(token) & 0xFFFFFFFF
    return zlib.crc32(str(token).encode("utf-8"))


def child_sequence(seed: int, *path) -> np.random.SeedSequence:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_token_int(t) for t in path]
    return np.random.SeedSequence(entropy)


def child_rng(seed: int, *path) -> np.random.Generator:
    """Generator for stream `path` under master `seed`."""
    return np.random.default_rng(child_sequence(seed, *path))


def child_seed(seed: int, *path) -> int:
    """64-bit integer seed derived for stream `path` under master `seed`."""
    return int(child_sequence(seed, *path).generate_state(1, np.uint64)[0])
