"""Partition strategy for the full-information model.

Each player classifies its own running mean into one of four regions of a
partition of the cube and plays its coordinate of the region's color.  The
interface between colors ``(2, 1)`` and ``(1, 2)`` sits on the half-plane
``theta = Theta`` and is padded by ``w_t`` on both sides.  ``Theta`` is either
a shared uniform draw in ``[pi/3, pi]`` or the deterministic sweeping angle of
:func:`dynamic_theta`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..geometry import Q1_ANGLE, Q2_ANGLE, Q3_ANGLE, cylindrical, halfplane_distance
from .common import (
    TIME_BLOCK, BatchOutcome, add_pairs, first_true, new_counts, stack_take,
)

W_CONSTANT = 16.0


class FIRegion(enum.IntEnum):
    A = 0
    B = 1
    C = 2
    D = 3


# (arm of Alice, arm of Bob) per region
FI_COLORING = {
    FIRegion.A: (2, 1),
    FIRegion.B: (3, 1),
    FIRegion.C: (3, 2),
    FIRegion.D: (1, 2),
}
_COLOR_A = np.array([FI_COLORING[r][0] for r in FIRegion], dtype=np.int8)
_COLOR_B = np.array([FI_COLORING[r][1] for r in FIRegion], dtype=np.int8)

# regions that share a boundary; the other pairs are (A, C), (A, D), (B, D)
FI_NEIGHBORS = frozenset({
    frozenset({FIRegion.A, FIRegion.B}),
    frozenset({FIRegion.B, FIRegion.C}),
    frozenset({FIRegion.C, FIRegion.D}),
})


def fi_neighbors(u: FIRegion, v: FIRegion) -> bool:
    return u == v or frozenset({u, v}) in FI_NEIGHBORS


@dataclass(frozen=True)
class FIConfig:
    T: int
    w_scale: float = 1.0
    interface: str = "random"  # or "dynamic"

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("horizon must be at least 1")
        if not self.w_scale > 0:
            raise ValueError("w_scale must be positive")
        if self.interface not in ("random", "dynamic"):
            raise ValueError(f"unknown interface {self.interface!r}")


def _padding(t, T, w_scale):
    return w_scale * W_CONSTANT * np.sqrt(math.log(T) / np.asarray(t, dtype=float))


def w_full(t: int, config: FIConfig) -> float:
    """Padding width ``w_scale * 16 * sqrt(ln T / t)``."""
    if not 1 <= t <= config.T:
        raise ValueError(f"t={t} outside [1, {config.T}]")
    return float(_padding(t, config.T, config.w_scale))


def dynamic_theta(t):
    """Deterministic interface: sweeps ``[pi/3, pi)`` once per dyadic block of rounds."""
    t = np.asarray(t, dtype=np.int64)
    if np.any(t < 1):
        raise ValueError("t must be >= 1")
    k = np.floor(np.log2(t)).astype(np.int64)
    k = np.where(np.left_shift(1, k) > t, k - 1, k)
    k = np.where(np.left_shift(1, k + 1) <= t, k + 1, k)
    start = np.left_shift(1, k)
    out = math.pi / 3.0 + (2.0 * math.pi / 3.0) * (t - start) / start
    return float(out) if np.ndim(out) == 0 else out


def fi_predicates(r, theta, Theta, w) -> dict:
    """The six membership tests of the partition, each evaluated on its own."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    d = halfplane_distance(r, theta, Theta)
    off_axis = r > 0
    before = (Q1_ANGLE <= theta) & (theta < Theta)
    after = (Theta <= theta) & (theta < Q2_ANGLE)
    return {
        "A": before & (d >= w),
        "B'": before & (d < w),
        "C'": after & (d < w) & off_axis,
        "D": after & (d >= w),
        "B''": (theta < Q1_ANGLE) | (Q3_ANGLE <= theta),
        "C''": (Q2_ANGLE <= theta) & (theta < Q3_ANGLE) & off_axis,
    }


def classify_fi_array(r, theta, Theta, w) -> np.ndarray:
    """Region codes (``FIRegion`` values) for arrays of cylindrical coordinates."""
    pred = fi_predicates(r, theta, Theta, w)
    code = np.full(np.broadcast(pred["A"], pred["B''"]).shape, FIRegion.C, dtype=np.int8)
    code = np.where(pred["A"], FIRegion.A, code)
    code = np.where(pred["B'"] | pred["B''"], FIRegion.B, code)
    code = np.where(pred["D"], FIRegion.D, code)
    return code.astype(np.int8)


def classify_fi(q, t: int, Theta: float, config: FIConfig) -> FIRegion:
    if not Q1_ANGLE <= Theta <= Q2_ANGLE:
        raise ValueError("interface angle must lie in [pi/3, pi]")
    _, r, theta = cylindrical(q)
    return FIRegion(int(classify_fi_array(r, theta, Theta, w_full(t, config))))


def color_fi(region: FIRegion):
    return FI_COLORING[FIRegion(region)]


class FIPlayerState:
    """Running means of one player's full-information observations."""

    def __init__(self, role: str):
        if role not in ("A", "B"):
            raise ValueError("role is 'A' or 'B'")
        self.role = role
        self.sums = np.zeros(3)
        self.t = 1

    @property
    def q(self) -> np.ndarray:
        if self.t == 1:
            return np.zeros(3)
        return self.sums / (self.t - 1)

    def observe(self, losses):
        self.sums += np.asarray(losses, dtype=float)
        self.t += 1


def interface_angle(t: int, config: FIConfig, Theta: Optional[float]) -> float:
    if config.interface == "dynamic":
        return dynamic_theta(t)
    if Theta is None:
        raise ValueError("random interface needs the shared angle")
    return Theta


def fi_act(state: FIPlayerState, t: int, config: FIConfig, Theta: Optional[float] = None) -> int:
    if state.t != t:
        raise ValueError(f"player state is at round {state.t}, asked to act at {t}")
    region = classify_fi(state.q, t, interface_angle(t, config, Theta), config)
    arms = color_fi(region)
    return arms[0] if state.role == "A" else arms[1]


def draw_interface(shared: np.random.Generator) -> float:
    return float(shared.uniform(Q1_ANGLE, Q2_ANGLE))


def simulate(config: FIConfig, p: np.ndarray, streams, record: bool = False) -> BatchOutcome:
    """Run a batch of episodes; ``streams`` is a list of :class:`EpisodeStreams`."""
    p = np.asarray(p, dtype=float)
    B, T = len(p), config.T
    if config.interface == "random":
        thetas = np.array([draw_interface(s.shared) for s in streams])
    else:
        thetas = None
    counts = new_counts(B)
    suffered = np.zeros(B, dtype=np.int64)
    first_coll = np.zeros(B, dtype=np.int64)
    omega = np.zeros(B, dtype=bool)
    sums_a = np.zeros((B, 3))
    sums_b = np.zeros((B, 3))
    trace = np.zeros((B, T, 2), dtype=np.int8) if record else None
    ep = np.arange(B)[:, None]

    for start in range(0, T, TIME_BLOCK):
        n = min(TIME_BLOCK, T - start)
        t = np.arange(start + 1, start + n + 1)
        la = stack_take([s.loss_alice for s in streams], n)
        lb = stack_take([s.loss_bob for s in streams], n)
        w = _padding(t, T, config.w_scale)
        Theta = thetas[:, None] if thetas is not None else dynamic_theta(t)[None, :]
        denom = np.maximum(t - 1, 1)[None, :, None]
        arms = []
        for sums, losses, colors in ((sums_a, la, _COLOR_A), (sums_b, lb, _COLOR_B)):
            before = np.cumsum(losses, axis=1) - losses
            q = (sums[:, None, :] + before) / denom
            if start == 0:
                q[:, 0, :] = 0.0
            omega |= (np.abs(q - p[:, None, :]) >= (w / 4.0)[None, :, None]).any(axis=(1, 2))
            _, r, theta = cylindrical(q)
            arms.append(colors[classify_fi_array(r, theta, Theta, w[None, :])])
            sums += losses.sum(axis=1)
        arm_a, arm_b = arms
        add_pairs(counts, arm_a, arm_b)
        collided = arm_a == arm_b
        own = (np.take_along_axis(la, arm_a[..., None].astype(np.int64) - 1, axis=2)[..., 0]
               + np.take_along_axis(lb, arm_b[..., None].astype(np.int64) - 1, axis=2)[..., 0])
        suffered += np.where(collided, 2, own).sum(axis=1)
        fc = first_true(collided, start)
        first_coll = np.where((first_coll == 0) & (fc > 0), fc, first_coll)
        if record:
            trace[ep, t[None, :] - 1, 0] = arm_a
            trace[ep, t[None, :] - 1, 1] = arm_b

    return BatchOutcome(counts, suffered, first_coll, omega, theta=thetas, trace=trace)
