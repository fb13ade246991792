"""Deterministic substream seeding for chunked Monte Carlo.

A pulse train is generated in fixed chunks of ``CHUNK_SIZE`` pulses.
Each chunk owns an independent PCG64 stream whose seed is a pure 64-bit
mix of (master_seed, chunk_index, lane):

    seed(chunk) = splitmix64( splitmix64(master_seed ^ LANE_SALT) + chunk )

with splitmix64 the standard 64-bit finalizer. Because a chunk's stream
depends only on these integers, the generated train is identical for any
worker count, and any chunk can be regenerated in isolation.

Lanes keep logically distinct random inputs (light, detector noise,
speckle, bootstrap resampling) on non-colliding streams even when the
same integer seed is reused for them.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

CHUNK_SIZE = 1 << 16

MASK64 = (1 << 64) - 1

LANE_LIGHT = 0
LANE_NOISE = 1
LANE_SPECKLE = 2
LANE_BOOTSTRAP = 3

_LANE_SALTS = (0x0, 0x9E3779B97F4A7C15, 0xC2B2AE3D27D4EB4F,
               0x165667B19E3779F9)


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer; bijective on 64-bit integers."""
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def check_seed(seed: int) -> int:
    if not isinstance(seed, int) or not 0 <= seed < (1 << 64):
        raise ValidationError("seed must be an integer in [0, 2^64)",
                              field="seed")
    return seed


def substream_seed(master_seed: int, chunk_index: int,
                   lane: int = LANE_LIGHT) -> int:
    check_seed(master_seed)
    h = splitmix64(master_seed ^ _LANE_SALTS[lane])
    return splitmix64((h + chunk_index) & MASK64)


def chunk_generator(master_seed: int, chunk_index: int,
                    lane: int = LANE_LIGHT) -> np.random.Generator:
    return np.random.Generator(
        np.random.PCG64(substream_seed(master_seed, chunk_index, lane)))


def chunk_layout(count: int, chunk_size: int = CHUNK_SIZE):
    """Yield (chunk_index, offset, size) covering ``count`` items."""
    index = 0
    offset = 0
    while offset < count:
        size = min(chunk_size, count - offset)
        yield index, offset, size
        index += 1
        offset += size
