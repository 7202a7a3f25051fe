"""Seeded random streams.

Every stochastic routine in the package takes a :class:`RandomSource`
explicitly.  Child streams are derived from ``(seed, *stream_index)`` through
numpy's ``SeedSequence`` spawn keys, so trial ``(i, j)`` of an experiment draws
the same numbers no matter which other trials were run.
"""

from __future__ import annotations

import numpy as np

__all__ = ["RandomSource"]

_U64 = 2**64


class RandomSource:
    """Deterministic PCG64 stream identified by a seed and a stream path."""

    def __init__(self, seed: int = 0, stream: tuple = ()):
        seed = int(seed)
        if not 0 <= seed < _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.stream = tuple(int(s) for s in stream)
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=self.stream))
        )

    def child(self, *index: int) -> "RandomSource":
        """Independent sub-stream addressed by ``index``."""
        return RandomSource(self.seed, self.stream + tuple(int(i) for i in index))

    def uniform(self, size=None):
        """Uniform draws on [0, 1)."""
        return self._gen.random(size)

    def integers(self, low: int, high: int, size=None):
        """Integers on [low, high)."""
        return self._gen.integers(low, high, size=size)

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream})"
