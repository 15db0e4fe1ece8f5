"""Deterministic strategy that tolerates a bounded number of collisions.

After an initialization where Alice sits on arm 3 and Bob alternates over
arms 1 and 2, play proceeds in dyadic phases ``(2^k, 2^(k+1)]``.  Alice
alternates between arms 1 and 2 phase by phase until the empirical gap
between them is clear, then fixates on the better one.  Bob round-robins over
his valid arms minus Alice's phase arm; a long run of losses of 1 on the arm he
shares with a fixated Alice tells him where she is, and he restarts with a
single-player bandit on the other two arms.

Phase ``k`` starts at ``max(2^k + 1, t0 + 1)`` so the rounds between the end
of initialization and the next power of two form a short first phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .common import TIME_BLOCK, BatchOutcome, add_pairs, new_counts, stack_take

DEFAULT_CONSTANTS = {"c_init": 40.0, "c_fix": 10.0, "c_gap": 100.0, "c_window": 40.0}


@dataclass(frozen=True)
class CollisionConfig:
    T: int
    c_init: float = 40.0
    c_fix: float = 10.0
    c_gap: float = 100.0
    c_window: float = 40.0
    single_player_policy: str = "lcb"

    def __post_init__(self):
        if self.T < 2:
            raise ValueError("horizon must be at least 2")
        for name in ("c_init", "c_fix", "c_gap", "c_window"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.single_player_policy != "lcb":
            raise ValueError(f"unknown single-player policy {self.single_player_policy!r}")

    @classmethod
    def scaled(cls, T: int, factor: float) -> "CollisionConfig":
        return cls(T, **{k: v * factor for k, v in DEFAULT_CONSTANTS.items()})

    @property
    def log_T(self) -> float:
        return math.log(self.T)

    @property
    def t0(self) -> int:
        """Initialization length, rounded to an even number of rounds."""
        t0 = int(round(self.c_init * math.sqrt(self.T * self.log_T)))
        return max(2, t0 + (t0 % 2))

    @property
    def window(self) -> int:
        return max(1, int(round(self.c_window * math.sqrt(self.T * self.log_T))))

    @property
    def removal_threshold(self) -> float:
        return 1.0 - math.sqrt(self.log_T / self.T)

    def fix_threshold(self, t: int) -> float:
        return self.c_fix * math.sqrt(self.log_T / (t - self.t0))

    def gap_threshold(self, t: int) -> float:
        return self.c_gap * math.sqrt(self.log_T / t)


def phase_index(t: int) -> int:
    """``k`` such that ``2^k < t <= 2^(k+1)``."""
    return (t - 1).bit_length() - 1


def phase_bounds(t: int, t0: int):
    """First and last round of the phase containing ``t > t0``."""
    k = phase_index(t)
    return max((1 << k) + 1, t0 + 1), 1 << (k + 1)


def alice_phase_arm(k: int) -> int:
    return 1 if k % 2 else 2


def init_schedule(t: int, config: CollisionConfig):
    if not 1 <= t <= config.t0:
        raise ValueError(f"round {t} is not part of the initialization (t0={config.t0})")
    return 3, (1 if t % 2 else 2)


def valid_set_after_init(q_b, config: CollisionConfig) -> frozenset:
    """Bob drops arms 1/2 whose empirical loss is indistinguishable from 1."""
    thr = config.removal_threshold
    return frozenset({3} | {i for i in (1, 2) if q_b[i - 1] < thr})


def _means(n, sums):
    return np.where(n > 0, sums / np.maximum(n, 1), 0.0)


class AliceState:
    def __init__(self, config: CollisionConfig):
        self.config = config
        self.n = np.zeros(3, dtype=np.int64)
        self.sums = np.zeros(3)
        self.fixated_arm = None
        self.phase_arm = None
        self.fixate_t = None

    @property
    def q(self):
        return _means(self.n, self.sums)

    def act(self, t: int) -> int:
        if t <= self.config.t0:
            return init_schedule(t, self.config)[0]
        return self.fixated_arm or self.phase_arm

    def observe(self, arm: int, bit: int):
        self.n[arm - 1] += 1
        self.sums[arm - 1] += bit


def alice_phase_decision(state: AliceState, t: int, config: CollisionConfig) -> int:
    """Run at the first round of a phase; returns the arm Alice plays in it.

    Fixation needs both arms observed at least once.  Alice settles on the arm
    with the smaller empirical loss, ties going to arm 1.
    """
    if state.fixated_arm is None and state.n[0] > 0 and state.n[1] > 0:
        q = state.q
        if abs(q[0] - q[1]) >= config.fix_threshold(t):
            state.fixated_arm = 1 if q[0] <= q[1] else 2
            state.fixate_t = t
    state.phase_arm = alice_phase_arm(phase_index(t))
    return state.fixated_arm or state.phase_arm


class BobState:
    def __init__(self, config: CollisionConfig):
        self.config = config
        self.n = np.zeros(3, dtype=np.int64)
        self.sums = np.zeros(3)
        self.valid = frozenset({1, 2, 3})
        self.committed_to_3 = False
        self.restarted = False
        self.restart_excluded_arm = None
        self.commit_t = None
        self.restart_t = None
        # phase bookkeeping
        self.rotation = ()
        self.phase_start = None
        self.phase_end = None
        self.watched_arm = None
        self.all_ones_run = True
        self.watched_obs = 0
        # single-player policy after restart
        self.sp_n = np.zeros(3, dtype=np.int64)
        self.sp_sums = np.zeros(3)
        self.sp_horizon = None

    @property
    def q(self):
        return _means(self.n, self.sums)

    def act(self, t: int) -> int:
        if t <= self.config.t0:
            return init_schedule(t, self.config)[1]
        if self.restarted:
            arms = tuple(i for i in (1, 2, 3) if i != self.restart_excluded_arm)
            return single_player_policy(self.sp_n, self.sp_sums, arms, self.sp_horizon)
        if self.committed_to_3:
            return 3
        return self.rotation[(t - self.phase_start) % len(self.rotation)]

    def observe(self, t: int, arm: int, bit: int):
        cfg = self.config
        if self.restarted:
            self.sp_n[arm - 1] += 1
            self.sp_sums[arm - 1] += bit
            return
        self.n[arm - 1] += 1
        self.sums[arm - 1] += bit
        if t == cfg.t0:
            self.valid = valid_set_after_init(self.q, cfg)
            return
        if t < cfg.t0 or self.committed_to_3:
            return
        window_end = self.phase_start + cfg.window - 1
        if t <= window_end and arm == self.watched_arm:
            self.watched_obs += 1
            if bit == 0:
                self.all_ones_run = False
        if t == window_end and window_end <= self.phase_end and self.watched_obs > 0 and self.all_ones_run:
            self.restarted = True
            self.restart_excluded_arm = self.watched_arm
            self.restart_t = t + 1
            self.sp_horizon = cfg.T - t


def bob_phase_decision(state: BobState, t: int, config: CollisionConfig):
    """Run at the first round of a phase: arm-3 removal, commitment, rotation."""
    if state.restarted or state.committed_to_3:
        return
    q, n = state.q, state.n
    thr = config.gap_threshold(t)
    if n[2] > 0:
        remove = state.valid == {1, 2, 3} and n[0] > 0 and n[1] > 0 and q[2] - max(q[0], q[1]) >= thr
        low = [i for i in (1, 2) if i in state.valid and n[i - 1] > 0]
        commit = bool(low) and q[2] - min(q[i - 1] for i in low) <= -thr
        if remove:
            state.valid = frozenset({1, 2})
        elif commit:
            state.committed_to_3 = True
            state.commit_t = t
            return
    k = phase_index(t)
    i_k = alice_phase_arm(k)
    state.rotation = tuple(sorted(state.valid - {i_k}))
    state.phase_start, state.phase_end = phase_bounds(t, config.t0)
    state.watched_arm = 3 - i_k
    state.all_ones_run = True
    state.watched_obs = 0


def single_player_policy(n, sums, arms, horizon) -> int:
    """Lower confidence bound on the mean loss; unplayed arms first, ties to the lower index."""
    arms = tuple(sorted(arms))
    for i in arms:
        if n[i - 1] == 0:
            return i
    log_h = math.log(max(horizon, 1))
    best, best_index = None, math.inf
    for i in arms:
        index = sums[i - 1] / n[i - 1] - math.sqrt(2.0 * log_h / n[i - 1])
        if index < best_index:
            best, best_index = i, index
    return best


def simulate(config: CollisionConfig, p: np.ndarray, streams, record: bool = False) -> BatchOutcome:
    p = np.asarray(p, dtype=float)
    B, T = len(p), config.T
    t0, W = config.t0, config.window
    ep = np.arange(B)
    arm_ids = np.array([1, 2, 3])

    n_a = np.zeros((B, 3), dtype=np.int64)
    s_a = np.zeros((B, 3))
    fixated = np.zeros(B, dtype=np.int64)
    fixate_t = np.zeros(B, dtype=np.int64)

    n_b = np.zeros((B, 3), dtype=np.int64)
    s_b = np.zeros((B, 3))
    valid = np.ones((B, 3), dtype=bool)
    committed = np.zeros(B, dtype=bool)
    commit_t = np.zeros(B, dtype=np.int64)
    restarted = np.zeros(B, dtype=bool)
    restart_t = np.zeros(B, dtype=np.int64)
    excluded = np.zeros(B, dtype=np.int64)
    sp_n = np.zeros((B, 3), dtype=np.int64)
    sp_s = np.zeros((B, 3))
    sp_logh = np.zeros(B)

    rotation = np.zeros((B, 3), dtype=np.int64)
    rot_len = np.ones(B, dtype=np.int64)
    all_ones = np.ones(B, dtype=bool)
    watched_obs = np.zeros(B, dtype=np.int64)
    phase_start = phase_end = watched = phase_arm = 0

    counts = new_counts(B)
    suffered = np.zeros(B, dtype=np.int64)
    first_coll = np.zeros(B, dtype=np.int64)
    trace = np.zeros((B, T, 2), dtype=np.int8) if record else None

    for start in range(0, T, TIME_BLOCK):
        size = min(TIME_BLOCK, T - start)
        losses = stack_take([s.loss for s in streams], size)
        arms = np.zeros((2, B, size), dtype=np.int64)
        for j in range(size):
            t = start + j + 1
            if t <= t0:
                a = np.full(B, 3)
                b = np.full(B, 1 if t % 2 else 2)
            else:
                if t == max(t0 + 1, (1 << phase_index(t)) + 1):
                    k = phase_index(t)
                    phase_start, phase_end = phase_bounds(t, t0)
                    phase_arm = alice_phase_arm(k)
                    watched = 3 - phase_arm
                    # Alice: fixation test
                    q_a = _means(n_a, s_a)
                    can_fix = (fixated == 0) & (n_a[:, 0] > 0) & (n_a[:, 1] > 0)
                    fix = can_fix & (np.abs(q_a[:, 0] - q_a[:, 1]) >= config.fix_threshold(t))
                    fixated = np.where(fix, np.where(q_a[:, 0] <= q_a[:, 1], 1, 2), fixated)
                    fixate_t = np.where(fix, t, fixate_t)
                    # Bob: removal of arm 3 / commitment to arm 3
                    active = ~(restarted | committed)
                    q_b = _means(n_b, s_b)
                    thr = config.gap_threshold(t)
                    seen3 = n_b[:, 2] > 0
                    remove = (active & seen3 & valid.all(axis=1) & (n_b[:, 0] > 0) & (n_b[:, 1] > 0)
                              & (q_b[:, 2] - q_b[:, :2].max(axis=1) >= thr))
                    low_ok = valid[:, :2] & (n_b[:, :2] > 0)
                    low_min = np.where(low_ok, q_b[:, :2], np.inf).min(axis=1)
                    commit = active & seen3 & ~remove & low_ok.any(axis=1) & (q_b[:, 2] - low_min <= -thr)
                    valid[remove, 2] = False
                    committed |= commit
                    commit_t = np.where(commit, t, commit_t)
                    # Bob: rotation over valid arms other than Alice's phase arm
                    cand = valid & (arm_ids != phase_arm)
                    rot_len = cand.sum(axis=1)
                    order = np.argsort(~cand, axis=1, kind="stable")
                    rotation = arm_ids[order]
                    all_ones[:] = True
                    watched_obs[:] = 0
                a = np.where(fixated > 0, fixated, phase_arm)
                b = rotation[ep, (t - phase_start) % rot_len]
                b = np.where(committed, 3, b)
                if restarted.any():
                    b = np.where(restarted, _lcb_arms(sp_n, sp_s, excluded, sp_logh), b)
            row = losses[:, j, :]
            collided = a == b
            fa = np.where(collided, 1, row[ep, a - 1])
            fb = np.where(collided, 1, row[ep, b - 1])
            n_a[ep, a - 1] += 1
            s_a[ep, a - 1] += fa
            plain = ~restarted
            bi = ep[plain]
            n_b[bi, b[plain] - 1] += 1
            s_b[bi, b[plain] - 1] += fb[plain]
            ri = ep[restarted]
            sp_n[ri, b[restarted] - 1] += 1
            sp_s[ri, b[restarted] - 1] += fb[restarted]
            suffered += np.where(collided, 2, fa + fb)
            first_coll = np.where((first_coll == 0) & collided, t, first_coll)
            arms[0, :, j] = a
            arms[1, :, j] = b

            if t == t0:
                q_b = _means(n_b, s_b)
                valid[:, :2] = q_b[:, :2] < config.removal_threshold
            elif t > t0:
                window_end = phase_start + W - 1
                watching = plain & ~committed
                if t <= window_end:
                    hit = watching & (b == watched)
                    watched_obs += hit
                    all_ones &= ~(hit & (fb == 0))
                if t == window_end and window_end <= phase_end:
                    go = watching & (watched_obs > 0) & all_ones
                    if go.any():
                        restarted |= go
                        restart_t = np.where(go, t + 1, restart_t)
                        excluded = np.where(go, watched, excluded)
                        sp_logh = np.where(go, math.log(max(T - t, 1)), sp_logh)
        add_pairs(counts, arms[0], arms[1])
        if record:
            trace[:, start:start + size, 0] = arms[0]
            trace[:, start:start + size, 1] = arms[1]

    omega = np.zeros(B, dtype=bool)
    return BatchOutcome(counts, suffered, first_coll, omega, fixate_t=fixate_t,
                        restart_t=restart_t, commit_t=commit_t, trace=trace)


def _lcb_arms(n, sums, excluded, log_h):
    """Vectorised :func:`single_player_policy` over the two arms left after a restart."""
    B = len(n)
    avail = np.arange(1, 4)[None, :] != excluded[:, None]
    safe_n = np.maximum(n, 1)
    index = sums / safe_n - np.sqrt(2.0 * log_h[:, None] / safe_n)
    index = np.where(n == 0, -np.inf, index)
    index = np.where(avail, index, np.inf)
    # argmin returns the first minimum, i.e. ties and unplayed arms go to the lower index
    return index.argmin(axis=1) + 1
