"""Explore-then-exploit with a randomized ambiguity threshold.

Both players explore round-robin with offset cycles (Alice 1, 2, 3; Bob 2, 3,
1) so exploration never collides.  Then each compares its own gaps against a
shared threshold ``tau = U / T^a``: Alice plays the smallest arm of her set of
potentially best arms, Bob the largest arm of his set of potentially second
best arms.

In the full-information model every round already reveals every arm, so there
is no separate exploration: each round applies the threshold rule to the
current running means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..environment import FeedbackModel
from .common import TIME_BLOCK, BatchOutcome, add_pairs, first_true, new_counts, stack_take

ALICE_CYCLE = (1, 2, 3)
BOB_CYCLE = (2, 3, 1)


@dataclass(frozen=True)
class BaselineConfig:
    T: int
    a: float = 0.2
    b: float = 0.8
    model: FeedbackModel = FeedbackModel.SHARED_BANDIT

    def __post_init__(self):
        object.__setattr__(self, "model", FeedbackModel.parse(self.model))
        if self.model is FeedbackModel.INDEPENDENT_FULL_INFO:
            object.__setattr__(self, "b", 1.0)
        if not 0 <= self.a < 1:
            raise ValueError("a must lie in [0, 1)")
        if not 0 < self.b <= 1:
            raise ValueError("b must lie in (0, 1]")
        if self.T < 1:
            raise ValueError("horizon must be at least 1")


def exploration_length(T: int, config: BaselineConfig) -> int:
    """``ceil(T^b)`` rounded up to a multiple of 6, never beyond ``T``."""
    if config.b >= 1:
        return T
    n = math.ceil(T ** config.b)
    n = 6 * math.ceil(n / 6)
    return min(n, T)


def draw_threshold(T: int, config: BaselineConfig, shared_rng: np.random.Generator) -> float:
    u = float(shared_rng.random())
    return threshold_from_uniform(u, T, config)


def threshold_from_uniform(u: float, T: int, config: BaselineConfig) -> float:
    return u / T ** config.a


def exploitation_choice(q, role: str, tau: float) -> int:
    q = np.asarray(q, dtype=float)
    order = np.argsort(q, kind="stable") + 1  # ascending, ties by arm index
    first, second, third = (q[i - 1] for i in order)
    if first <= second - tau:
        chosen = {order[0]} if role == "A" else {order[1]}
    elif second <= third - tau:
        chosen = {order[0], order[1]}
    else:
        chosen = {1, 2, 3}
    return int(min(chosen) if role == "A" else max(chosen))


def _choice_array(q: np.ndarray, role: str, tau) -> np.ndarray:
    """:func:`exploitation_choice` over the last axis of ``q``."""
    order = np.argsort(q, axis=-1, kind="stable")
    sq = np.take_along_axis(q, order, axis=-1)
    arms = order + 1
    clear_best = sq[..., 0] <= sq[..., 1] - tau
    clear_worst = sq[..., 1] <= sq[..., 2] - tau
    lo2 = np.minimum(arms[..., 0], arms[..., 1])
    hi2 = np.maximum(arms[..., 0], arms[..., 1])
    if role == "A":
        return np.where(clear_best, arms[..., 0], np.where(clear_worst, lo2, 1))
    return np.where(clear_best, arms[..., 1], np.where(clear_worst, hi2, 3))


def exploration_arm(t: int, role: str) -> int:
    cycle = ALICE_CYCLE if role == "A" else BOB_CYCLE
    return cycle[(t - 1) % 3]


def simulate(config: BaselineConfig, p: np.ndarray, streams, record: bool = False) -> BatchOutcome:
    p = np.asarray(p, dtype=float)
    T = config.T
    taus = np.array([draw_threshold(T, config, s.shared) for s in streams])
    if config.model is FeedbackModel.INDEPENDENT_FULL_INFO:
        return _simulate_full_info(config, p, streams, taus, record)
    return _simulate_bandit(config, p, streams, taus, record)


def _simulate_bandit(config, p, streams, taus, record):
    B, T = len(p), config.T
    L = exploration_length(T, config)
    ep = np.arange(B)[:, None]
    counts = new_counts(B)
    suffered = np.zeros(B, dtype=np.int64)
    n = np.zeros((2, B, 3), dtype=np.int64)
    sums = np.zeros((2, B, 3))
    trace = np.zeros((B, T, 2), dtype=np.int8) if record else None
    exploit = None

    # segments never straddle the end of exploration
    edges = sorted(set(range(0, T, TIME_BLOCK)) | {L, T})
    for start, stop in zip(edges, edges[1:]):
        if start >= T:
            break
        size = stop - start
        losses = stack_take([s.loss for s in streams], size)
        t = np.arange(start + 1, start + size + 1)
        arm_a = np.broadcast_to(np.array(ALICE_CYCLE)[(t - 1) % 3], (B, size)).copy()
        arm_b = np.broadcast_to(np.array(BOB_CYCLE)[(t - 1) % 3], (B, size)).copy()
        explore = t <= L
        if not explore.all():
            if exploit is None:
                q = np.where(n > 0, sums / np.maximum(n, 1), 0.0)
                exploit = (_choice_array(q[0], "A", taus), _choice_array(q[1], "B", taus))
            arm_a[:, ~explore] = exploit[0][:, None]
            arm_b[:, ~explore] = exploit[1][:, None]
        fa = np.take_along_axis(losses, arm_a[..., None] - 1, axis=2)[..., 0]
        fb = np.take_along_axis(losses, arm_b[..., None] - 1, axis=2)[..., 0]
        collided = arm_a == arm_b
        fa = np.where(collided, 1, fa)
        fb = np.where(collided, 1, fb)
        ex = explore[None, :]
        for player, arms_, fb_ in ((0, arm_a, fa), (1, arm_b, fb)):
            onehot = (arms_[..., None] == np.arange(1, 4)) & ex[..., None]
            n[player] += onehot.sum(axis=1)
            sums[player] += (onehot * fb_[..., None]).sum(axis=1)
        add_pairs(counts, arm_a, arm_b)
        suffered += np.where(collided, 2, fa + fb).sum(axis=1)
        if record:
            trace[ep, t[None, :] - 1, 0] = arm_a
            trace[ep, t[None, :] - 1, 1] = arm_b

    first_coll = _first_collision_from_counts(counts, L, T)
    exploit_t = np.full(B, L + 1 if L < T else 0, dtype=np.int64)
    return BatchOutcome(counts, suffered, first_coll, np.zeros(B, dtype=bool),
                        threshold=taus, exploit_t=exploit_t, trace=trace)


def _first_collision_from_counts(counts, L, T):
    # exploration never collides and exploitation arms are constant afterwards
    collided = np.trace(counts, axis1=1, axis2=2) > 0
    return np.where(collided, L + 1, 0).astype(np.int64)


def _simulate_full_info(config, p, streams, taus, record):
    B, T = len(p), config.T
    ep = np.arange(B)[:, None]
    counts = new_counts(B)
    suffered = np.zeros(B, dtype=np.int64)
    first_coll = np.zeros(B, dtype=np.int64)
    sums_a = np.zeros((B, 3))
    sums_b = np.zeros((B, 3))
    trace = np.zeros((B, T, 2), dtype=np.int8) if record else None

    for start in range(0, T, TIME_BLOCK):
        size = min(TIME_BLOCK, T - start)
        t = np.arange(start + 1, start + size + 1)
        la = stack_take([s.loss_alice for s in streams], size)
        lb = stack_take([s.loss_bob for s in streams], size)
        denom = np.maximum(t - 1, 1)[None, :, None]
        arms = []
        for role, sums, losses in (("A", sums_a, la), ("B", sums_b, lb)):
            q = (sums[:, None, :] + np.cumsum(losses, axis=1) - losses) / denom
            if start == 0:
                q[:, 0, :] = 0.0
            arms.append(_choice_array(q, role, taus[:, None]))
            sums += losses.sum(axis=1)
        arm_a, arm_b = arms
        add_pairs(counts, arm_a, arm_b)
        collided = arm_a == arm_b
        own = (np.take_along_axis(la, arm_a[..., None] - 1, axis=2)[..., 0]
               + np.take_along_axis(lb, arm_b[..., None] - 1, axis=2)[..., 0])
        suffered += np.where(collided, 2, own).sum(axis=1)
        fc = first_true(collided, start)
        first_coll = np.where((first_coll == 0) & (fc > 0), fc, first_coll)
        if record:
            trace[ep, t[None, :] - 1, 0] = arm_a
            trace[ep, t[None, :] - 1, 1] = arm_b

    return BatchOutcome(counts, suffered, first_coll, np.zeros(B, dtype=bool),
                        threshold=taus, trace=trace)
