import numpy as np
import pytest

from coordbandit.harness import StrategySpec, run_episode

CASES = [
    (StrategySpec("partition", w_scale=0.25), "random", 2000),
    (StrategySpec("partition-dynamic", w_scale=0.25), "hard:0.2", 2000),
    (StrategySpec("bandit-partition", w_scale=2 ** -15 * 8), "random", 2000),
    (StrategySpec("bandit-partition", w_scale=2 ** -15 * 8, theta_grid=True), "hard:0.2", 2000),
    (StrategySpec("collision", c_scale=0.05), "random", 4000),
    (StrategySpec("collision", c_scale=0.05), "fixed:0.2,0.25,0.9", 4000),
]


@pytest.mark.parametrize("spec, instance, T", CASES, ids=lambda x: getattr(x, "name", str(x)))
def test_batch_engine_matches_round_by_round_engine(spec, instance, T):
    for episode in range(2):
        b = run_episode(spec, instance, T, 7, episode)
        r = run_episode(spec, instance, T, 7, episode, engine="reference")
        assert np.array_equal(b.pair_counts, r.pair_counts)
        assert b.regret == pytest.approx(r.regret, abs=1e-9)
        assert (b.suffered, b.omega_violation, b.first_collision) == (r.suffered, r.omega_violation, r.first_collision)
        assert (b.fixate_t, b.restart_t, b.commit_t, b.exploit_t) == (r.fixate_t, r.restart_t, r.commit_t, r.exploit_t)


def test_unknown_engine():
    with pytest.raises(ValueError):
        run_episode(StrategySpec("partition"), "random", 100, 0, engine="gpu")
