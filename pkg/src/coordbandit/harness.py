"""Seeded episode runner, Monte Carlo aggregation, exponent fits and CSV output.

Episodes are identified by ``(master seed, T, episode index)``; each one draws
its instance, shared randomness and losses from its own labelled substreams
(see :mod:`coordbandit.streams`).  Episodes are simulated in batches of
:data:`BATCH_SIZE` consecutive indices whatever the number of workers, so the
output never depends on the parallelism width.
"""

from __future__ import annotations

import csv
import io
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .environment import EpisodeStreams, FeedbackModel
from .instances import InstanceSpec, parse_instance_spec
from .streams import substream
from .strategies import bandit, baseline, collision, full_info
from .strategies.common import pseudo_regret_from_counts

log = logging.getLogger(__name__)

BATCH_SIZE = 100

STRATEGIES = {
    "partition": FeedbackModel.INDEPENDENT_FULL_INFO,
    "partition-dynamic": FeedbackModel.INDEPENDENT_FULL_INFO,
    "bandit-partition": FeedbackModel.SHARED_BANDIT,
    "collision": FeedbackModel.SHARED_BANDIT,
    "explore-exploit": None,  # either model
}

CSV_COLUMNS = (
    "model", "strategy", "T", "seed", "episode", "theta", "p1", "p2", "p3",
    "regret", "collisions", "omega_violation", "fixate_t", "restart_t",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StrategySpec:
    """Strategy id, feedback model and every tunable constant.

    ``None`` constants keep the defaults.  ``c_scale`` multiplies all
    four collision-strategy constants after the per-constant overrides.
    """

    name: str
    model: Optional[FeedbackModel] = None
    w_scale: float = 1.0
    theta_grid: bool = False
    c_init: Optional[float] = None
    c_fix: Optional[float] = None
    c_gap: Optional[float] = None
    c_window: Optional[float] = None
    c_scale: float = 1.0
    a: float = 0.2
    b: float = 0.8

    def __post_init__(self):
        if self.name not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.name!r}; choose from {sorted(STRATEGIES)}")
        model = self.model
        if model is None:
            model = STRATEGIES[self.name] or FeedbackModel.SHARED_BANDIT
        try:
            model = FeedbackModel.parse(model)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        required = STRATEGIES[self.name]
        if required is not None and model is not required:
            raise ConfigError(f"strategy {self.name!r} runs on the {required.value} model only")
        object.__setattr__(self, "model", model)

    def build(self, T: int):
        """Return the strategy config for horizon ``T``; raises ConfigError."""
        try:
            if self.name in ("partition", "partition-dynamic"):
                interface = "dynamic" if self.name == "partition-dynamic" else "random"
                return full_info.FIConfig(T, w_scale=self.w_scale, interface=interface)
            if self.name == "bandit-partition":
                mode = "grid" if self.theta_grid else "continuous"
                return bandit.BanditConfig(T, w_scale=self.w_scale, theta_mode=mode)
            if self.name == "collision":
                consts = dict(collision.DEFAULT_CONSTANTS)
                for key in consts:
                    if getattr(self, key) is not None:
                        consts[key] = getattr(self, key)
                return collision.CollisionConfig(T, **{k: v * self.c_scale for k, v in consts.items()})
            return baseline.BaselineConfig(T, a=self.a, b=self.b, model=self.model)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def kernel(self):
        return {
            "partition": full_info.simulate,
            "partition-dynamic": full_info.simulate,
            "bandit-partition": bandit.simulate,
            "collision": collision.simulate,
            "explore-exploit": baseline.simulate,
        }[self.name]


@dataclass
class EpisodeResult:
    strategy: str
    model: str
    T: int
    seed: int
    episode: int
    theta: Optional[float]
    p: tuple
    regret: float
    collisions: int
    omega_violation: bool
    fixate_t: int = 0
    restart_t: int = 0
    commit_t: int = 0
    exploit_t: int = 0
    first_collision: int = 0
    suffered: int = 0
    instance_theta: Optional[float] = None
    pair_counts: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.collisions < 0 or self.regret < -1e-9:
            raise ValueError("collision count and pseudo-regret are non-negative")


def draw_instance(instance_spec: InstanceSpec, T: int, seed: int, episode: int):
    rng = substream(seed, T, episode, "instance")
    return instance_spec.draw(T, rng)


def run_batch(spec: StrategySpec, instance_spec: InstanceSpec, T: int, seed: int,
              episodes: Sequence[int], record: bool = False):
    """Simulate the given episode indices together; returns results and the raw batch outcome."""
    config = spec.build(T)
    instance_spec.validate(T)
    drawn = [draw_instance(instance_spec, T, seed, e) for e in episodes]
    p = np.array([inst.p for inst, _ in drawn])
    streams = [EpisodeStreams.create(p[i], spec.model, seed, T, e) for i, e in enumerate(episodes)]
    out = spec.kernel()(config, p, streams, record=record)
    regret = pseudo_regret_from_counts(out.pair_counts, p)
    results = []
    for i, e in enumerate(episodes):
        results.append(EpisodeResult(
            strategy=spec.name, model=spec.model.value, T=T, seed=seed, episode=int(e),
            theta=None if out.theta is None else float(out.theta[i]),
            p=tuple(float(x) for x in p[i]),
            regret=float(regret[i]),
            collisions=int(out.collisions[i]),
            omega_violation=bool(out.omega_violation[i]),
            fixate_t=int(out.fixate_t[i]), restart_t=int(out.restart_t[i]),
            commit_t=int(out.commit_t[i]), exploit_t=int(out.exploit_t[i]),
            first_collision=int(out.first_collision[i]), suffered=int(out.suffered[i]),
            instance_theta=drawn[i][1],
            pair_counts=out.pair_counts[i].copy(),
        ))
    return results, out


def run_episode(spec: StrategySpec, instance_spec, T: int, seed: int, episode: int = 0,
                engine: str = "batch") -> EpisodeResult:
    """One episode, either through the batch kernel or the round-by-round reference engine."""
    if isinstance(instance_spec, str):
        instance_spec = parse_instance_spec(instance_spec)
    if engine == "batch":
        return run_batch(spec, instance_spec, T, seed, [episode])[0][0]
    if engine == "reference":
        from .reference import run_reference
        return run_reference(spec, instance_spec, T, seed, episode)
    raise ConfigError(f"unknown engine {engine!r}")


@dataclass(frozen=True)
class SweepConfig:
    spec: StrategySpec
    instance: InstanceSpec
    T_grid: tuple
    episodes: int
    seed: int = 0
    first_episode: int = 0
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        if not self.T_grid:
            raise ConfigError("the T grid is empty")
        if self.episodes < 1:
            raise ConfigError("need at least one episode per cell")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for T in self.T_grid:
            self.spec.build(T)
            try:
                self.instance.validate(T)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None

    def work_items(self):
        items = []
        for T in self.T_grid:
            idx = list(range(self.first_episode, self.first_episode + self.episodes))
            for k in range(0, len(idx), BATCH_SIZE):
                items.append((T, tuple(idx[k:k + BATCH_SIZE])))
        return items


def _work(args):
    spec, instance, seed, T, episodes = args
    return run_batch(spec, instance, T, seed, episodes)[0]


def monte_carlo(sweep: SweepConfig):
    """Run every episode of the sweep; returns ``(results, summary rows)``.

    Results are sorted by ``(T, episode)`` so aggregation is independent of
    completion order.
    """
    jobs = [(sweep.spec, sweep.instance, sweep.seed, T, eps) for T, eps in sweep.work_items()]
    results = []
    if sweep.workers == 1 or len(jobs) == 1:
        for job in jobs:
            results.extend(_work(job))
    else:
        with ProcessPoolExecutor(max_workers=sweep.workers) as pool:
            for chunk in pool.map(_work, jobs):
                results.extend(chunk)
    results.sort(key=lambda r: (r.T, r.episode))
    return results, summarize(results)


@dataclass(frozen=True)
class SummaryRow:
    T: int
    episodes: int
    mean_regret: float
    std_regret: float
    collision_rate: float      # fraction of episodes with at least one collision
    mean_collisions: float
    omega_rate: float


def summarize(results) -> list:
    by_T = {}
    for r in sorted(results, key=lambda r: (r.T, r.episode)):
        by_T.setdefault(r.T, []).append(r)
    rows = []
    for T, rs in sorted(by_T.items()):
        reg = np.array([r.regret for r in rs])
        col = np.array([r.collisions for r in rs])
        rows.append(SummaryRow(
            T=T, episodes=len(rs),
            mean_regret=float(reg.mean()),
            std_regret=float(reg.std(ddof=1)) if len(rs) > 1 else 0.0,
            collision_rate=float((col > 0).mean()),
            mean_collisions=float(col.mean()),
            omega_rate=float(np.mean([r.omega_violation for r in rs])),
        ))
    return rows


def fit_exponent(points) -> float:
    """Least-squares slope of ``log(regret)`` against ``log(T)``."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("need at least three (T, regret) points")
    T = np.array([float(t) for t, _ in pts])
    R = np.array([float(v) for _, v in pts])
    if np.any(T <= 0) or np.any(R <= 0):
        raise ValueError("T and regret values must be positive")
    x, y = np.log(T), np.log(R)
    x = x - x.mean()
    return float((x * (y - y.mean())).sum() / (x * x).sum())


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in sorted(results, key=lambda r: (r.T, r.episode)):
        writer.writerow([_fmt(v) for v in (
            r.model, r.strategy, r.T, r.seed, r.episode, r.theta, *r.p,
            r.regret, r.collisions, r.omega_violation,
            r.fixate_t or None, r.restart_t or None,
        )])
    return buf.getvalue()


def emit_csv(results, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(results))


def summary_text(rows, exponent: Optional[float] = None) -> str:
    lines = ["T,episodes,mean_regret,std_regret,collision_rate,mean_collisions,omega_rate"]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in (
            row.T, row.episodes, row.mean_regret, row.std_regret,
            row.collision_rate, row.mean_collisions, row.omega_rate,
        )))
    if exponent is not None:
        lines.append(f"# fitted exponent {exponent:.4f}")
    return "\n".join(lines) + "\n"


def summary_path(out: str, suffix: str) -> str:
    root, _ = os.path.splitext(out)
    return root + suffix
