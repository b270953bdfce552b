"""Counter-based uniform streams built on the splitmix64 mixer.

Vertex i of a sample keyed by `seed` gets its coordinates from counters
(2i, 2i+1); Monte-Carlo shard s derives its own key from mix(seed, s).
Identical (seed, counter) always yields the identical double, independent
of batching or thread count.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64


def splitmix64(x):
    """splitmix64 finalizer; accepts scalars or uint64 arrays."""
    with np.errstate(over="ignore"):
        z = (np.asarray(x).astype(np.uint64) + _GOLDEN)
        z = (z ^ (z >> _U64(30))) * _MIX1
        z = (z ^ (z >> _U64(27))) * _MIX2
        return z ^ (z >> _U64(31))


def mix(seed, stream):
    """64-bit key for substream `stream` of master `seed`."""
    s = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    return splitmix64(s ^ (np.asarray(stream).astype(np.uint64) * _GOLDEN))


def uniforms(seed, counters):
    """Doubles in [0, 1) for the given counter array under `seed`."""
    bits = mix(seed, counters)
    return (bits >> _U64(11)).astype(np.float64) * (2.0 ** -53)
