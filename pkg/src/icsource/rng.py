"""Deterministic 64-bit hashing and streams backing every simulation draw.

Two primitives cover all randomness that must be reproducible across the
compiled and pure-Python kernels:

* ``keyed_u64`` — a counter-style hash of a key tuple.  Influence attempts are
  keyed by (seed, round, parent, child), so a draw depends only on its key,
  never on evaluation order.  This is what makes ascending and descending
  attempt orders provably equivalent, and lets worker processes reproduce any
  sub-computation from its key alone.
* ``SeedStream`` — a sequential SplitMix64 generator used where a plain stream
  is the natural fit (random-walk steps, uniform picks).

The compiled kernels re-implement the same arithmetic on ``uint64``; the
backend-parity tests pin the two implementations together.
"""
from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_SEED_OFFSET = 0x6A09E667F3BCC909
_INV_2_53 = 2.0**-53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche mix of a 64-bit value."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def keyed_u64(seed: int, *parts: int) -> int:
    """Hash (seed, parts...) to a uniform 64-bit value."""
    h = mix64((seed + _SEED_OFFSET) & _MASK)
    for p in parts:
        h = mix64(h ^ (p & _MASK))
    return h


def keyed_u01(seed: int, *parts: int) -> float:
    """Hash (seed, parts...) to a float in [0, 1) with 53 random bits."""
    return (keyed_u64(seed, *parts) >> 11) * _INV_2_53


def derive_seed(seed: int, *parts: int) -> int:
    """Derive an independent child seed; alias of ``keyed_u64`` kept for intent."""
    return keyed_u64(seed, *parts)


def keyed_u64_array(seed: int, *part_arrays: np.ndarray) -> np.ndarray:
    """Vectorised ``keyed_u64`` over aligned uint64 arrays (bit-identical)."""
    with np.errstate(over="ignore"):
        h0 = np.uint64(mix64((seed + _SEED_OFFSET) & _MASK))
        h = np.broadcast_to(h0, np.broadcast_shapes(*(a.shape for a in part_arrays))).copy()
        c1 = np.uint64(0xBF58476D1CE4E5B9)
        c2 = np.uint64(0x94D049BB133111EB)
        for part in part_arrays:
            z = h ^ part.astype(np.uint64)
            z = (z ^ (z >> np.uint64(30))) * c1
            z = (z ^ (z >> np.uint64(27))) * c2
            h = z ^ (z >> np.uint64(31))
        return h


class SeedStream:
    """Sequential SplitMix64 generator (state += golden gamma; output mixed)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        return mix64(self._state)

    def next_u01(self) -> float:
        return (self.next_u64() >> 11) * _INV_2_53
