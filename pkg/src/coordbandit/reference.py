"""Round-by-round reference engine.

Drives the per-player state machines of each strategy through
:func:`coordbandit.environment.step`, one round at a time.  It is slow and
exists to cross-check the batch kernels.
"""

from __future__ import annotations

import numpy as np

from .environment import EpisodeStreams, FeedbackModel, Instance, step
from .strategies import bandit, baseline, collision, full_info


def run_reference(spec, instance_spec, T: int, seed: int, episode: int):
    from .harness import EpisodeResult, draw_instance

    config = spec.build(T)
    instance, inst_theta = draw_instance(instance_spec, T, seed, episode)
    streams = EpisodeStreams.create(instance.p, spec.model, seed, T, episode)
    play = {
        "partition": _full_info, "partition-dynamic": _full_info,
        "bandit-partition": _bandit, "collision": _collision,
        "explore-exploit": _baseline,
    }[spec.name]
    log = play(config, instance, streams, spec.model)
    return EpisodeResult(
        strategy=spec.name, model=spec.model.value, T=T, seed=seed, episode=episode,
        theta=log.get("theta"), p=instance.p,
        regret=log["regret"], collisions=log["collisions"],
        omega_violation=log.get("omega", False),
        fixate_t=log.get("fixate_t", 0), restart_t=log.get("restart_t", 0),
        commit_t=log.get("commit_t", 0), exploit_t=log.get("exploit_t", 0),
        first_collision=log["first_collision"], suffered=log["suffered"],
        instance_theta=inst_theta, pair_counts=log["pair_counts"],
    )


class _Log(dict):
    def __init__(self):
        super().__init__(regret=0.0, collisions=0, first_collision=0, suffered=0,
                         pair_counts=np.zeros((3, 3), dtype=np.int64), trace=[])

    def record(self, t, out):
        self["regret"] += out.regret_increment
        self["suffered"] += out.suffered_loss
        a, b = out.joint_action
        self["pair_counts"][a - 1, b - 1] += 1
        self["trace"].append((a, b))
        if out.collided:
            self["collisions"] += 1
            if not self["first_collision"]:
                self["first_collision"] = t


def _full_info(config, instance: Instance, streams, model):
    log = _Log()
    p = np.asarray(instance.p)
    Theta = None
    if config.interface == "random":
        Theta = full_info.draw_interface(streams.shared)
        log["theta"] = Theta
    alice, bob = full_info.FIPlayerState("A"), full_info.FIPlayerState("B")
    for t in range(1, config.T + 1):
        w = full_info.w_full(t, config)
        for s in (alice, bob):
            if np.any(np.abs(s.q - p) >= w / 4.0):
                log["omega"] = True
        a = full_info.fi_act(alice, t, config, Theta)
        b = full_info.fi_act(bob, t, config, Theta)
        out = step(instance, model, (a, b), streams.for_step(model))
        alice.observe(out.feedback_a)
        bob.observe(out.feedback_b)
        log.record(t, out)
    return log


def _bandit(config, instance: Instance, streams, model):
    log = _Log()
    p = np.asarray(instance.p)
    Theta = bandit.draw_interface(streams.shared, config)
    log["theta"] = Theta
    alice, bob = bandit.BanditPlayerState("A"), bandit.BanditPlayerState("B")
    for t in range(1, config.T + 1):
        if log["collisions"] == 0:
            for s in (alice, bob):
                if np.any(np.abs(s.q - p) >= bandit.omega_radius(s.n, config.T, config.w_scale)):
                    log["omega"] = True
        a = bandit.bandit_act(alice, t, Theta, config)
        b = bandit.bandit_act(bob, t, Theta, config)
        if (t - 1) % 4 == 0 and not log.get("exploit_t"):
            if {alice.block_region, bob.block_region}.isdisjoint(bandit.EXPLORATION_REGIONS):
                log["exploit_t"] = t
        out = step(instance, model, (a, b), streams.for_step(model))
        bandit.update_estimate(alice, a, out.feedback_a)
        bandit.update_estimate(bob, b, out.feedback_b)
        log.record(t, out)
    return log


def _collision(config, instance: Instance, streams, model):
    log = _Log()
    alice, bob = collision.AliceState(config), collision.BobState(config)
    t0 = config.t0
    for t in range(1, config.T + 1):
        if t > t0 and t == collision.phase_bounds(t, t0)[0]:
            collision.alice_phase_decision(alice, t, config)
            collision.bob_phase_decision(bob, t, config)
        a, b = alice.act(t), bob.act(t)
        out = step(instance, model, (a, b), streams.for_step(model))
        alice.observe(a, out.feedback_a)
        bob.observe(t, b, out.feedback_b)
        log.record(t, out)
    log["fixate_t"] = alice.fixate_t or 0
    log["restart_t"] = bob.restart_t or 0
    log["commit_t"] = bob.commit_t or 0
    return log


def _baseline(config, instance: Instance, streams, model):
    log = _Log()
    tau = baseline.draw_threshold(config.T, config, streams.shared)
    if model is FeedbackModel.INDEPENDENT_FULL_INFO:
        sums = [np.zeros(3), np.zeros(3)]
        for t in range(1, config.T + 1):
            q = [s / (t - 1) if t > 1 else np.zeros(3) for s in sums]
            a = baseline.exploitation_choice(q[0], "A", tau)
            b = baseline.exploitation_choice(q[1], "B", tau)
            out = step(instance, model, (a, b), streams.for_step(model))
            sums[0] += out.feedback_a
            sums[1] += out.feedback_b
            log.record(t, out)
        return log
    L = baseline.exploration_length(config.T, config)
    n = np.zeros((2, 3))
    sums = np.zeros((2, 3))
    chosen = None
    for t in range(1, config.T + 1):
        if t <= L:
            a, b = baseline.exploration_arm(t, "A"), baseline.exploration_arm(t, "B")
        else:
            if chosen is None:
                q = np.where(n > 0, sums / np.maximum(n, 1), 0.0)
                chosen = (baseline.exploitation_choice(q[0], "A", tau),
                          baseline.exploitation_choice(q[1], "B", tau))
                log["exploit_t"] = t
            a, b = chosen
        out = step(instance, model, (a, b), streams.for_step(model))
        if t <= L:
            n[0, a - 1] += 1
            n[1, b - 1] += 1
            sums[0, a - 1] += out.feedback_a
            sums[1, b - 1] += out.feedback_b
        log.record(t, out)
    return log
