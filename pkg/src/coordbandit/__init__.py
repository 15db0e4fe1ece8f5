"""Coordination strategies for two players sharing three Bernoulli arms."""

from .environment import FeedbackModel, Instance, pseudo_regret_increment, step
from .geometry import CubePoint, CylPoint, HalfPlane, from_cylindrical, to_cylindrical
from .harness import (
    EpisodeResult, StrategySpec, SweepConfig, emit_csv, fit_exponent, monte_carlo, run_episode,
)
from .instances import HardInstanceConfig, hard_instance, parse_instance_spec, sample_hard_theta

__all__ = [
    "CubePoint", "CylPoint", "EpisodeResult", "FeedbackModel", "HalfPlane", "HardInstanceConfig",
    "Instance", "StrategySpec", "SweepConfig", "emit_csv", "fit_exponent", "from_cylindrical",
    "hard_instance", "monte_carlo", "parse_instance_spec", "pseudo_regret_increment",
    "run_episode", "sample_hard_theta", "step", "to_cylindrical",
]
