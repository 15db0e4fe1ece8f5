"""Two players, three Bernoulli arms, collisions cost the maximal loss."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .geometry import pair_optimum
from .streams import LossStream, substream

ARMS = (1, 2, 3)


class FeedbackModel(enum.Enum):
    SHARED_BANDIT = "bandit"
    INDEPENDENT_FULL_INFO = "full-info"

    @classmethod
    def parse(cls, value: Union[str, "FeedbackModel"]) -> "FeedbackModel":
        if isinstance(value, cls):
            return value
        for member in cls:
            if member.value == value:
                return member
        raise ValueError(f"unknown feedback model {value!r}")


@dataclass(frozen=True)
class Instance:
    p: Tuple[float, float, float]

    def __post_init__(self):
        p = tuple(float(x) for x in self.p)
        if len(p) != 3:
            raise ValueError("an instance has exactly three arms")
        if not all(0.0 <= x <= 1.0 for x in p):
            raise ValueError(f"mean losses must lie in [0, 1], got {p}")
        object.__setattr__(self, "p", p)

    @property
    def p_star(self) -> float:
        return pair_optimum(self.p)


@dataclass(frozen=True)
class RoundOutcome:
    joint_action: Tuple[int, int]
    collided: bool
    feedback_a: Union[int, np.ndarray]
    feedback_b: Union[int, np.ndarray]
    regret_increment: float
    suffered_loss: int


def _check_arm(arm):
    if arm not in ARMS:
        raise ValueError(f"arm must be one of {ARMS}, got {arm!r}")


def pseudo_regret_increment(instance: Instance, joint_action) -> float:
    a, b = joint_action
    _check_arm(a)
    _check_arm(b)
    p = instance.p
    if a == b:
        return 2.0 - instance.p_star
    return p[a - 1] + p[b - 1] - instance.p_star


def regret_table(p) -> np.ndarray:
    """``table[..., a-1, b-1]`` is the pseudo-regret of the joint action ``(a, b)``."""
    p = np.asarray(p, dtype=float)
    star = pair_optimum(p)
    table = p[..., :, None] + p[..., None, :] - np.asarray(star)[..., None, None]
    idx = np.arange(3)
    table[..., idx, idx] = 2.0 - np.asarray(star)[..., None]
    return table


def step(instance: Instance, model: FeedbackModel, joint_action, losses) -> RoundOutcome:
    """Play one round.

    ``losses`` is a single :class:`LossStream` for the bandit model and an
    ``(alice, bob)`` pair of streams for the full-information model.
    """
    a, b = joint_action
    _check_arm(a)
    _check_arm(b)
    collided = a == b
    regret = pseudo_regret_increment(instance, joint_action)
    if model is FeedbackModel.SHARED_BANDIT:
        row = losses.next_round()
        if collided:
            return RoundOutcome((a, b), True, 1, 1, regret, 2)
        fa, fb = int(row[a - 1]), int(row[b - 1])
        return RoundOutcome((a, b), False, fa, fb, regret, fa + fb)
    alice, bob = losses
    la = alice.next_round().copy()
    lb = bob.next_round().copy()
    suffered = 2 if collided else int(la[a - 1]) + int(lb[b - 1])
    return RoundOutcome((a, b), collided, la, lb, regret, suffered)


@dataclass
class EpisodeStreams:
    """All randomness of one episode, drawn from labelled substreams."""

    shared: np.random.Generator
    loss: Optional[LossStream] = None
    loss_alice: Optional[LossStream] = None
    loss_bob: Optional[LossStream] = None

    @classmethod
    def create(cls, p, model: FeedbackModel, master_seed: int, T: int, episode: int):
        shared = substream(master_seed, T, episode, "shared")
        if model is FeedbackModel.SHARED_BANDIT:
            loss = LossStream(p, substream(master_seed, T, episode, "loss"))
            return cls(shared, loss=loss)
        return cls(
            shared,
            loss_alice=LossStream(p, substream(master_seed, T, episode, "loss_alice")),
            loss_bob=LossStream(p, substream(master_seed, T, episode, "loss_bob")),
        )

    def for_step(self, model: FeedbackModel):
        if model is FeedbackModel.SHARED_BANDIT:
            return self.loss
        return (self.loss_alice, self.loss_bob)
