from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..environment import regret_table

TIME_BLOCK = 1024


@dataclass
class BatchOutcome:
    """Per-episode accounting shared by every strategy kernel.

    Transition times use 0 for "never happened".
    """

    pair_counts: np.ndarray            # (B, 3, 3) rounds spent on each joint action
    suffered: np.ndarray               # (B,) realized total loss of the pair
    first_collision: np.ndarray        # (B,) round of the first collision, 0 if none
    omega_violation: np.ndarray        # (B,) bool
    theta: Optional[np.ndarray] = None  # (B,) shared interface angle when used
    threshold: Optional[np.ndarray] = None  # (B,) shared ambiguity threshold
    fixate_t: np.ndarray = None
    restart_t: np.ndarray = None
    commit_t: np.ndarray = None
    exploit_t: np.ndarray = None
    trace: Optional[np.ndarray] = None  # (B, T, 2) arms, only when recorded
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        B = len(self.suffered)
        for name in ("fixate_t", "restart_t", "commit_t", "exploit_t"):
            if getattr(self, name) is None:
                setattr(self, name, np.zeros(B, dtype=np.int64))

    @property
    def collisions(self) -> np.ndarray:
        return np.trace(self.pair_counts, axis1=1, axis2=2)

    def regret(self, p) -> np.ndarray:
        return pseudo_regret_from_counts(self.pair_counts, p)


def pseudo_regret_from_counts(pair_counts, p) -> np.ndarray:
    """Cumulative pseudo-regret from joint-action counts (fixed summation order)."""
    table = regret_table(p)
    return (np.asarray(pair_counts, dtype=float) * table).reshape(len(table), 9).sum(axis=1)


def new_counts(B: int) -> np.ndarray:
    return np.zeros((B, 3, 3), dtype=np.int64)


def add_pairs(counts: np.ndarray, arms_a: np.ndarray, arms_b: np.ndarray):
    """Accumulate joint-action counts; arms are 1-based with shape ``(B, ...)``."""
    B = counts.shape[0]
    ep = np.broadcast_to(np.arange(B).reshape((B,) + (1,) * (arms_a.ndim - 1)), arms_a.shape)
    flat = ep * 9 + (arms_a.astype(np.int64) - 1) * 3 + (arms_b.astype(np.int64) - 1)
    counts += np.bincount(flat.ravel(), minlength=B * 9).reshape(B, 3, 3)


def first_true(mask: np.ndarray, offset: int) -> np.ndarray:
    """1-based round of the first True along axis 1, 0 where there is none."""
    hit = mask.any(axis=1)
    return np.where(hit, mask.argmax(axis=1) + offset + 1, 0)


def stack_take(streams, n: int) -> np.ndarray:
    return np.stack([s.take(n) for s in streams])
