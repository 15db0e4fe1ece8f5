import math
import os

import numpy as np
import pytest

from coordbandit import cli
from coordbandit.checks import CheckResult
from coordbandit.environment import regret_table
from coordbandit.harness import (
    BATCH_SIZE, CSV_COLUMNS, ConfigError, EpisodeResult, StrategySpec, SweepConfig, csv_text,
    fit_exponent, monte_carlo, run_batch, run_episode, summarize,
)
from coordbandit.instances import parse_instance_spec

RANDOM = parse_instance_spec("random")


def sweep(name="collision", T=(2048,), episodes=6, seed=3, **kw):
    spec = StrategySpec(name, **kw)
    return SweepConfig(spec, RANDOM, tuple(T), episodes, seed=seed)


def test_spec_validation():
    with pytest.raises(ConfigError):
        StrategySpec("ucb")
    with pytest.raises(ConfigError):
        StrategySpec("partition", model="bandit")
    with pytest.raises(ConfigError):
        StrategySpec("collision", model="full-info")
    with pytest.raises(ConfigError):
        StrategySpec("bandit-partition").build(3)
    assert StrategySpec("explore-exploit", model="full-info").model.value == "full-info"
    with pytest.raises(ConfigError):
        SweepConfig(StrategySpec("partition"), RANDOM, (), 5)
    with pytest.raises(ConfigError):
        SweepConfig(StrategySpec("partition"), parse_instance_spec("hard:0.2"), (64,), 5)


def test_collision_constants_scale():
    cfg = StrategySpec("collision", c_init=20.0, c_scale=0.5).build(1024)
    assert (cfg.c_init, cfg.c_fix, cfg.c_gap, cfg.c_window) == (10.0, 5.0, 50.0, 20.0)


def test_same_seed_same_results():
    a, _ = monte_carlo(sweep())
    b, _ = monte_carlo(sweep())
    assert csv_text(a) == csv_text(b)
    c, _ = monte_carlo(sweep(seed=4))
    assert csv_text(a) != csv_text(c)


def test_episode_independent_of_batch_membership():
    spec = StrategySpec("bandit-partition", w_scale=2 ** -12)
    alone = run_episode(spec, "random", 1024, 2, 5)
    together, _ = run_batch(spec, RANDOM, 1024, 2, [3, 4, 5, 6])
    assert alone == together[2]


@pytest.mark.parametrize("name, model", [
    ("partition", None), ("partition-dynamic", None), ("bandit-partition", None),
    ("collision", None), ("explore-exploit", "bandit"), ("explore-exploit", "full-info"),
])
def test_regret_resums_from_trace(name, model):
    spec = StrategySpec(name, model=model, w_scale=0.05 if "partition" in name else 1.0, c_scale=0.1)
    T = 1500
    results, out = run_batch(spec, RANDOM, T, 7, range(8), record=True)
    for i, r in enumerate(results):
        p = np.array(r.p)
        arms = out.trace[i].astype(int)
        table = regret_table(p)
        inc = table[arms[:, 0] - 1, arms[:, 1] - 1]
        assert r.regret == pytest.approx(inc.sum(), rel=1e-9, abs=1e-9)
        assert r.collisions == int((arms[:, 0] == arms[:, 1]).sum())
        assert r.pair_counts.sum() == T


def test_summary_means():
    results, rows = monte_carlo(sweep(T=(1024, 2048), episodes=4))
    assert [r.T for r in rows] == [1024, 2048]
    for row in rows:
        mine = [r.regret for r in results if r.T == row.T]
        assert row.mean_regret == pytest.approx(np.mean(mine))
        assert row.std_regret == pytest.approx(np.std(mine, ddof=1))
    single = summarize(results[:1])[0]
    assert single.mean_regret == results[0].regret and single.std_regret == 0.0


def test_disjoint_halves_pool_to_whole():
    whole, _ = monte_carlo(sweep(episodes=8))
    lo, _ = monte_carlo(SweepConfig(StrategySpec("collision"), RANDOM, (2048,), 4, seed=3))
    hi, _ = monte_carlo(SweepConfig(StrategySpec("collision"), RANDOM, (2048,), 4, seed=3, first_episode=4))
    assert csv_text(lo + hi) == csv_text(whole)


def test_work_items_are_fixed_batches():
    items = SweepConfig(StrategySpec("partition"), RANDOM, (64, 128), 250).work_items()
    assert [len(e) for _, e in items] == [BATCH_SIZE, BATCH_SIZE, 50] * 2


def test_fit_exponent_examples():
    grid = [2 ** k for k in range(12, 21, 2)]
    assert fit_exponent([(t, 3 * t ** 0.8) for t in grid]) == pytest.approx(0.8)
    assert fit_exponent([(t, math.sqrt(t * math.log(t))) for t in grid]) == pytest.approx(0.54, abs=0.01)
    assert fit_exponent([(t, 5.0) for t in grid]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 0), (4, 3)])


def test_csv_header_and_rows():
    assert csv_text([]) == ",".join(CSV_COLUMNS) + "\n"
    assert csv_text([]) == ("model,strategy,T,seed,episode,theta,p1,p2,p3,regret,collisions,"
                           "omega_violation,fixate_t,restart_t\n")
    results, _ = monte_carlo(sweep(T=(2048, 1024), episodes=3))
    lines = csv_text(list(reversed(results))).splitlines()
    keys = [(int(l.split(",")[2]), int(l.split(",")[4])) for l in lines[1:]]
    assert keys == sorted(keys)
    first = dict(zip(CSV_COLUMNS, lines[1].split(",")))
    assert first["model"] == "bandit" and first["theta"] == ""
    assert first["omega_violation"] in ("0", "1")


def test_episode_result_rejects_negative_values():
    with pytest.raises(ValueError):
        EpisodeResult("partition", "full-info", 10, 0, 0, 0.5, (0.1, 0.2, 0.3), -1.0, 0, False)


def test_cli_simulate_writes_outputs(tmp_path, capsys):
    out = tmp_path / "run.csv"
    code = cli.main(["simulate", "--strategy", "partition", "--T", "2^10", "--episodes", "3",
                     "--w-scale", "0.25", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(out.read_text().splitlines()) == 4
    assert (tmp_path / "run.summary.csv").exists()
    svg = (tmp_path / "run.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "<svg" in svg


def test_cli_sweep_to_stdout(capsys):
    code = cli.main(["sweep", "--strategy", "explore-exploit", "--T", "256", "512", "1024",
                     "--episodes", "2", "--instance", "fixed:0.1,0.5,0.9"])
    assert code == 0
    text = capsys.readouterr().out
    assert text.startswith(",".join(CSV_COLUMNS))
    assert "# fitted exponent" in text


def test_cli_config_errors(capsys):
    assert cli.main(["simulate", "--strategy", "collision", "--model", "full-info", "--T", "100"]) == 1
    assert cli.main(["simulate", "--strategy", "partition", "--T", "100", "--instance", "bogus"]) == 1
    assert cli.main(["simulate", "--strategy", "partition", "--T", "100", "--w-scale", "-1"]) == 1
    assert "configuration error" in capsys.readouterr().err


def test_cli_check_geometry(monkeypatch, capsys):
    assert cli.main(["check-geometry", "--scale", "0.001"]) == 0
    assert "suites passed" in capsys.readouterr().out
    monkeypatch.setattr(cli.checks, "run_all", lambda seed, scale: [CheckResult("fake", 10, 1)])
    assert cli.main(["check-geometry"]) == 2


def test_parallel_workers_match_serial(tmp_path):
    serial, _ = monte_carlo(sweep(T=(512,), episodes=2 * BATCH_SIZE + 5))
    cfg = sweep(T=(512,), episodes=2 * BATCH_SIZE + 5)
    parallel, _ = monte_carlo(SweepConfig(cfg.spec, cfg.instance, cfg.T_grid, cfg.episodes, cfg.seed, workers=3))
    assert csv_text(serial) == csv_text(parallel)
