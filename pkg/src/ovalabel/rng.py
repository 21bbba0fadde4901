"""Portable, seedable random number generation.

Everything protocol-relevant (dataset shuffles, weight initialization,
minority oversampling) draws from the SplitMix64 generator defined here so
that a run is reproducible from its seed alone, in any implementation of
the same algorithm.

SplitMix64 (public-domain algorithm by Sebastiano Vigna):

    state    <- (state + 0x9E3779B97F4A7C15) mod 2^64
    z        <- state
    z        <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9  mod 2^64
    z        <- (z XOR (z >> 27)) * 0x94D049BB133111EB  mod 2^64
    output   <- z XOR (z >> 31)

Derived draws, in terms of ``next_u64()``:

* ``next_below(n)``   -- ``next_u64() mod n`` (modulo method).
* ``uniform(lo, hi)`` -- ``lo + (hi - lo) * u`` with
  ``u = (next_u64() >> 11) * 2**-53`` in ``[0, 1)``.
* ``normal(mu, sigma)`` -- Box-Muller, cosine branch only: draws
  ``u1 = ((next_u64() >> 11) + 1) * 2**-53`` in ``(0, 1]`` then
  ``u2 = (next_u64() >> 11) * 2**-53`` and returns
  ``mu + sigma * sqrt(-2 ln u1) * cos(2 pi u2)``.
* ``shuffle(items)``  -- Fisher-Yates from the top:
  ``for i in n-1 .. 1: j = next_below(i + 1); swap(items[i], items[j])``.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & _MASK64
    return h


def derive_seed(base: int, *parts: str | int) -> int:
    """Fold string/int parts into a base seed, one SplitMix64 step per part.

    Used to give sub-streams (per-class init, per-event balancing) their own
    deterministic seeds. Each part is hashed with FNV-1a over its UTF-8 text,
    XORed into the running value, and passed through one SplitMix64 step.
    """
    h = base & _MASK64
    for part in parts:
        h ^= fnv1a64(str(part).encode("utf-8"))
        h = SplitMix64(h).next_u64()
    return h


class SplitMix64:
    """SplitMix64 stream seeded from a 64-bit integer (wider seeds are folded)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        u1 = ((self.next_u64() >> 11) + 1) * 2.0**-53
        u2 = (self.next_u64() >> 11) * 2.0**-53
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
