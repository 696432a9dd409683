"""Counter-based random streams.

A stream is addressed by a (seed, counter) pair and always replays the same
draw sequence for the same address. Distinct counters map to disjoint Philox
counter blocks (spaced 2**64 apart), so per-item streams can be derived as
(seed, item_index) with no shared mutable state and no overlap.
"""

from __future__ import annotations

import numpy as np

_U64 = (1 << 64) - 1


class RngStream:
    """Deterministic stream of draws addressed by (seed, counter)."""

    def __init__(self, seed: int, counter: int = 0):
        self.seed = int(seed) & _U64
        self.counter = int(counter) & _U64
        bitgen = np.random.Philox(key=self.seed, counter=self.counter << 64)
        self._gen = np.random.Generator(bitgen)

    def child(self, counter: int) -> "RngStream":
        """A fresh sibling stream with the same seed and a new counter."""
        return RngStream(self.seed, counter)

    def uniform(self, low: float = 0.0, high: float = 1.0, size=None):
        return self._gen.uniform(low, high, size=size)

    def beta(self, a: float, b: float, size=None):
        return self._gen.beta(a, b, size=size)

    def integers(self, low: int, high: int, size=None):
        return self._gen.integers(low, high, size=size)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, counter={self.counter})"
