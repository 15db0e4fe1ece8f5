"""Seed derivation and lazily generated loss sequences.

Every episode owns a handful of named substreams.  A substream is the PCG64
generator seeded by ``SeedSequence(master_seed, spawn_key=(T, episode, label))``
where ``label`` is the integer code below, so two labels of the same episode,
or the same label in two episodes, never share a stream.
"""

from __future__ import annotations

import numpy as np

STREAM_LABELS = {
    "instance": 0,
    "shared": 1,     # shared randomness: interface angle, ambiguity threshold
    "loss": 2,       # the single loss sequence of the bandit model
    "loss_alice": 3,  # independent full-information sequences
    "loss_bob": 4,
}

CHUNK = 4096


def substream(master_seed: int, T: int, episode: int, label: str) -> np.random.Generator:
    key = (int(T), int(episode), STREAM_LABELS[label])
    ss = np.random.SeedSequence(int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


class LossStream:
    """Bernoulli loss bits for the three arms, one row per round.

    Rows are generated ``CHUNK`` at a time, so the sequence depends only on
    the generator, never on how callers slice it.
    """

    def __init__(self, p, rng: np.random.Generator):
        self.p = np.asarray(p, dtype=float)
        self.rng = rng
        self._buf = np.empty((0, 3), dtype=np.int8)
        self._pos = 0
        self.rounds_drawn = 0

    def _refill(self):
        u = self.rng.random((CHUNK, 3))
        self._buf = (u < self.p).astype(np.int8)
        self._pos = 0

    def take(self, n: int) -> np.ndarray:
        parts = []
        while n > 0:
            if self._pos == len(self._buf):
                self._refill()
            k = min(n, len(self._buf) - self._pos)
            parts.append(self._buf[self._pos:self._pos + k])
            self._pos += k
            n -= k
        self.rounds_drawn += sum(len(x) for x in parts)
        if not parts:
            return np.empty((0, 3), dtype=np.int8)
        return parts[0] if len(parts) == 1 else np.concatenate(parts)

    def next_round(self) -> np.ndarray:
        return self.take(1)[0]
