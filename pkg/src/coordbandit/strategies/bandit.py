"""Partition strategy for the bandit model.

Seven regions around the half-planes ``P`` (shared random angle), ``Q1``,
``Q2`` and ``Q3``.  Rounds are grouped in blocks of four; at the first round
of a block each player classifies its own estimate and then follows one row
of :data:`PLAY_TABLE` for the whole block.  Rows ``F``, ``H`` and ``J`` make
each player visit all three arms, which is how exploration happens.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..geometry import Q1_ANGLE, Q2_ANGLE, Q3_ANGLE, cylindrical, halfplane_distance
from .common import TIME_BLOCK, BatchOutcome, add_pairs, new_counts, stack_take

W_CONSTANT = 2.0 ** 15


class BRegion(enum.IntEnum):
    E = 0
    F = 1
    G = 2
    H = 3
    I = 4  # noqa: E741
    J = 5
    K = 6


EXPLORATION_REGIONS = frozenset({BRegion.F, BRegion.H, BRegion.J})

# PLAY_TABLE[region][offset] = (arm of Alice, arm of Bob), offsets are rounds 4t+1..4t+4
PLAY_TABLE = {
    BRegion.E: ((2, 1), (2, 1), (1, 2), (1, 2)),
    BRegion.F: ((2, 1), (3, 1), (1, 2), (1, 3)),
    BRegion.G: ((3, 1), (3, 1), (1, 3), (1, 3)),
    BRegion.H: ((3, 1), (3, 2), (1, 3), (2, 3)),
    BRegion.I: ((3, 2), (3, 2), (2, 3), (2, 3)),
    BRegion.J: ((3, 2), (1, 2), (2, 3), (2, 1)),
    BRegion.K: ((1, 2), (1, 2), (2, 1), (2, 1)),
}
_TABLE = np.array([PLAY_TABLE[r] for r in BRegion], dtype=np.int8)  # (7, 4, 2)

_PATH = "EFGHIJK"
COMPATIBLE_EDGES = frozenset(
    frozenset({BRegion[a], BRegion[b]})
    for a, b in list(zip(_PATH, _PATH[1:])) + [("E", "G"), ("G", "I"), ("I", "K"), ("F", "H"), ("H", "J")]
)


def compatible(u: BRegion, v: BRegion) -> bool:
    return u == v or frozenset({BRegion(u), BRegion(v)}) in COMPATIBLE_EDGES


def compatible_by_table(u: BRegion, v: BRegion) -> bool:
    """Brute force: no offset where Alice on ``u`` meets Bob on ``v``, either way round."""
    for k in range(4):
        if PLAY_TABLE[u][k][0] == PLAY_TABLE[v][k][1]:
            return False
        if PLAY_TABLE[v][k][0] == PLAY_TABLE[u][k][1]:
            return False
    return True


@dataclass(frozen=True)
class BanditConfig:
    T: int
    w_scale: float = 1.0
    theta_mode: str = "continuous"  # or "grid"

    def __post_init__(self):
        if self.T < 4:
            raise ValueError("horizon must be at least 4")
        if not self.w_scale > 0:
            raise ValueError("w_scale must be positive")
        if self.theta_mode not in ("continuous", "grid"):
            raise ValueError(f"unknown theta mode {self.theta_mode!r}")


def _padding(t, T, w_scale):
    return w_scale * W_CONSTANT * np.sqrt(math.log(T) / np.asarray(t, dtype=float))


def w_bandit(t: int, config: BanditConfig) -> float:
    if not 1 <= t <= config.T:
        raise ValueError(f"t={t} outside [1, {config.T}]")
    return float(_padding(t, config.T, config.w_scale))


def bandit_predicates(r, theta, Theta, w) -> dict:
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    half, wide = w / 2.0, 1.5 * w
    d_p = halfplane_distance(r, theta, Theta)
    d_q1 = halfplane_distance(r, theta, Q1_ANGLE)
    d_q2 = halfplane_distance(r, theta, Q2_ANGLE)
    d_q3 = halfplane_distance(r, theta, Q3_ANGLE)
    far_sector = (theta < Q1_ANGLE) | (Q3_ANGLE <= theta)
    E = (Q1_ANGLE <= theta) & (theta < Theta) & (d_q1 >= half) & (d_p >= wide)
    G = far_sector & (d_q1 >= half) & (d_q3 >= half)
    H = np.minimum(d_p, d_q3) < half
    I = (Q2_ANGLE <= theta) & (theta < Q3_ANGLE) & (d_q2 >= half) & (d_q3 >= half)  # noqa: E741
    K = (Theta <= theta) & (theta < Q2_ANGLE) & (d_q2 >= half) & (d_p >= wide)
    F = ((theta < Theta) | (Q3_ANGLE <= theta)) & ~(E | G | H)
    J = (Theta <= theta) & (theta < Q3_ANGLE) & ~(H | I | K)
    return {"E": E, "F": F, "G": G, "H": H, "I": I, "J": J, "K": K}


def classify_bandit_array(r, theta, Theta, w) -> np.ndarray:
    pred = bandit_predicates(r, theta, Theta, w)
    code = np.zeros(np.broadcast(pred["E"], pred["H"]).shape, dtype=np.int8)
    for region in BRegion:
        code = np.where(pred[region.name], region.value, code)
    return code.astype(np.int8)


def classify_bandit(q, t: int, Theta: float, config: BanditConfig) -> BRegion:
    if not Q1_ANGLE <= Theta <= Q2_ANGLE:
        raise ValueError("interface angle must lie in [pi/3, pi]")
    _, r, theta = cylindrical(q)
    return BRegion(int(classify_bandit_array(r, theta, Theta, w_bandit(t, config))))


def table_lookup(region: BRegion, offset: int, role: str) -> int:
    if not 1 <= offset <= 4:
        raise ValueError("offset is 1..4")
    pair = PLAY_TABLE[BRegion(region)][offset - 1]
    return pair[0] if role == "A" else pair[1]


class BanditPlayerState:
    def __init__(self, role: str):
        if role not in ("A", "B"):
            raise ValueError("role is 'A' or 'B'")
        self.role = role
        self.n = np.zeros(3, dtype=np.int64)
        self.sums = np.zeros(3)
        self.block_region = None

    @property
    def q(self) -> np.ndarray:
        return np.where(self.n > 0, self.sums / np.maximum(self.n, 1), 0.0)


def update_estimate(state: BanditPlayerState, arm: int, loss_bit: int) -> BanditPlayerState:
    """Record an observed bit.  A collision shows up as a 1 like any other."""
    if loss_bit not in (0, 1):
        raise ValueError("loss bits are 0 or 1")
    state.n[arm - 1] += 1
    state.sums[arm - 1] += loss_bit
    return state


def bandit_act(state: BanditPlayerState, t: int, Theta: float, config: BanditConfig) -> int:
    offset = (t - 1) % 4 + 1
    if offset == 1 or state.block_region is None:
        state.block_region = classify_bandit(state.q, t, Theta, config)
    return table_lookup(state.block_region, offset, state.role)


def draw_interface(shared: np.random.Generator, config: BanditConfig) -> float:
    theta = float(shared.uniform(Q1_ANGLE, Q2_ANGLE))
    if config.theta_mode == "grid":
        T = config.T
        k = min(max(round(theta * T), math.ceil(Q1_ANGLE * T)), math.floor(Q2_ANGLE * T))
        theta = k / T
    return theta


def omega_radius(n, T, w_scale):
    """Concentration radius ``w_{4n+5} / 32`` for an arm observed ``n`` times."""
    return _padding(4 * np.asarray(n) + 5, T, w_scale) / 32.0


def simulate(config: BanditConfig, p: np.ndarray, streams, record: bool = False) -> BatchOutcome:
    p = np.asarray(p, dtype=float)
    B, T = len(p), config.T
    thetas = np.array([draw_interface(s.shared, config) for s in streams])
    ep = np.arange(B)
    n = np.zeros((2, B, 3), dtype=np.int64)
    sums = np.zeros((2, B, 3))
    counts = new_counts(B)
    suffered = np.zeros(B, dtype=np.int64)
    first_coll = np.zeros(B, dtype=np.int64)
    exploit_t = np.zeros(B, dtype=np.int64)
    omega = np.zeros(B, dtype=bool)
    trace = np.zeros((B, T, 2), dtype=np.int8) if record else None
    rows_a = rows_b = None

    for start in range(0, T, TIME_BLOCK):
        size = min(TIME_BLOCK, T - start)
        losses = stack_take([s.loss for s in streams], size)
        arms = np.zeros((2, B, size), dtype=np.int8)
        for j in range(size):
            t = start + j + 1
            k = (t - 1) % 4
            if k == 0:
                w = float(_padding(t, T, config.w_scale))
                q = np.where(n > 0, sums / np.maximum(n, 1), 0.0)
                _, r, theta = cylindrical(q)
                regions = classify_bandit_array(r, theta, thetas[None, :], w)
                rows_a = _TABLE[regions[0], :, 0]
                rows_b = _TABLE[regions[1], :, 1]
                exploiting = ~np.isin(regions, [int(x) for x in EXPLORATION_REGIONS]).any(axis=0)
                exploit_t = np.where((exploit_t == 0) & exploiting, t, exploit_t)
            clean = first_coll == 0
            if clean.any():
                q = np.where(n > 0, sums / np.maximum(n, 1), 0.0)
                bad = (np.abs(q - p[None]) >= omega_radius(n, T, config.w_scale)).any(axis=(0, 2))
                omega |= bad & clean
            a = rows_a[:, k]
            b = rows_b[:, k]
            row = losses[:, j, :]
            collided = a == b
            fa = np.where(collided, 1, row[ep, a - 1])
            fb = np.where(collided, 1, row[ep, b - 1])
            n[0, ep, a - 1] += 1
            n[1, ep, b - 1] += 1
            sums[0, ep, a - 1] += fa
            sums[1, ep, b - 1] += fb
            suffered += np.where(collided, 2, fa + fb)
            first_coll = np.where(clean & collided, t, first_coll)
            arms[0, :, j] = a
            arms[1, :, j] = b
        add_pairs(counts, arms[0], arms[1])
        if record:
            trace[:, start:start + size, 0] = arms[0]
            trace[:, start:start + size, 1] = arms[1]

    return BatchOutcome(counts, suffered, first_coll, omega, theta=thetas,
                        exploit_t=exploit_t, trace=trace)
