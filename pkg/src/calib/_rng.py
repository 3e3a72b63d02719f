"""Seed derivation so every randomized step gets its own reproducible stream."""

from __future__ import annotations

import zlib

import numpy as np


def _key_to_int(key: int | str) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"seed keys must be non-negative, got {key}")
    return int(key)


def derive_seed(seed: int, *keys: int | str) -> int:
    """Return a 32-bit seed derived from ``seed`` and a path of keys.

    Streams for different key paths are statistically independent, and
    adding a new key path never changes the value of an existing one.
    """
    entropy = [_key_to_int(seed)] + [_key_to_int(k) for k in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])


def make_rng(seed: int, *keys: int | str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))
