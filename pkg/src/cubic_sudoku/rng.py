"""Deterministic random streams for reproducible runs.

All randomness in this package flows through :class:`DeterministicRandomSource`,
a thin wrapper around numpy's counter-based Philox (4x64) bit generator.  The
Philox key is the pair ``(seed, stream)``: identical pairs yield bit-identical
streams on every platform.

Substream derivation is tree-indexed: child ``k`` of a source with stream id
``s`` has stream id ``s * 2**20 + k + 1``.  Provided root stream ids are kept
in ``[1, 2**20]`` (as :func:`trial_stream` does; plain stream 0 is reserved
for direct single runs), the map is injective across nesting depths <= 3 and
``k < 2**20``, which covers every use here: per-trial streams, and
per-replica streams forked from a trial.

Uniform doubles are drawn in blocks for speed.  Integers in ``[0, k)`` are
derived as ``floor(u * k)``; the bias is O(k * 2**-53) and irrelevant at the
sample sizes used.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_SPAWN_BASE = 1 << 20
_BLOCK = 4096


class DeterministicRandomSource:
    """Buffered uniform/integer draws from a keyed Philox stream."""

    __slots__ = ("seed", "stream", "_gen", "_buf", "_pos")

    def __init__(self, seed: int, stream: int = 0):
        self.seed = seed & _MASK64
        self.stream = stream & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))
        self._buf = self._gen.random(_BLOCK)
        self._pos = 0

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        if self._pos == _BLOCK:
            self._buf = self._gen.random(_BLOCK)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def randint(self, k: int) -> int:
        """Uniform integer in [0, k)."""
        if k <= 0:
            raise ValueError("randint requires k >= 1")
        v = int(self.uniform() * k)
        return v if v < k else k - 1

    def choice(self, seq):
        return seq[self.randint(len(seq))]

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n)."""
        return self._gen.permutation(n)

    def spawn(self, k: int) -> "DeterministicRandomSource":
        """Child stream ``k`` of this source (tree-indexed, see module docs)."""
        if not 0 <= k < _SPAWN_BASE:
            raise ValueError(f"spawn index out of range: {k}")
        return DeterministicRandomSource(self.seed, self.stream * _SPAWN_BASE + k + 1)

    def __repr__(self):
        return f"DeterministicRandomSource(seed={self.seed}, stream={self.stream})"


def trial_stream(seed: int, trial: int) -> DeterministicRandomSource:
    """Root stream for trial ``trial`` of a master seed (ids 1..2**20)."""
    if not 0 <= trial < _SPAWN_BASE - 1:
        raise ValueError(f"trial index out of range: {trial}")
    return DeterministicRandomSource(seed, trial + 1)
