import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coordbandit.geometry import cylindrical, from_cylindrical, CylPoint
from coordbandit.strategies import bandit
from coordbandit.strategies.bandit import (
    EXPLORATION_REGIONS, PLAY_TABLE, BanditConfig, BanditPlayerState, BRegion, bandit_act,
    bandit_predicates, classify_bandit, classify_bandit_array, compatible, compatible_by_table,
    draw_interface, table_lookup, update_estimate, w_bandit,
)
from coordbandit.strategies.full_info import FIConfig, w_full

T16 = 65536
unit = st.floats(0.0, 1.0, allow_nan=False)


def region_at(m, r, theta, Theta, w):
    return BRegion(int(classify_bandit_array(r, theta, Theta, w)))


def test_padding_examples():
    assert w_bandit(T16, BanditConfig(T16)) == pytest.approx(2 ** 15 * math.sqrt(16 * math.log(2) / T16))
    assert w_bandit(T16, BanditConfig(T16)) == pytest.approx(426.3, abs=0.05)
    assert w_bandit(T16, BanditConfig(T16, w_scale=2 ** -15)) == pytest.approx(0.0130087, abs=1e-7)
    for t in (1, 77, 4096, T16):
        assert w_bandit(t, BanditConfig(T16, w_scale=2 ** -15 * 16)) == w_full(t, FIConfig(T16))
    with pytest.raises(ValueError):
        w_bandit(0, BanditConfig(T16))


def test_config_validation():
    with pytest.raises(ValueError):
        BanditConfig(3)
    with pytest.raises(ValueError):
        BanditConfig(10, w_scale=-1)
    with pytest.raises(ValueError):
        BanditConfig(10, theta_mode="dyadic")


def test_classification_examples():
    assert region_at(0.5, 0.0, 0.0, math.pi / 2, 0.1) is BRegion.H
    assert region_at(0.5, 0.4, 5 * math.pi / 6, math.pi / 2, 0.1) is BRegion.K
    assert region_at(0.5, 0.4, 5 * math.pi / 6, math.pi / 2, 0.5) is BRegion.J
    for Theta in (math.pi / 3, 2.0, math.pi):
        assert region_at(0.5, 0.4, 0.0, Theta, 0.1) is BRegion.G


def test_classify_cube_point():
    q = from_cylindrical(CylPoint(0.5, 0.4, 5 * math.pi / 6))
    cfg = BanditConfig(T16, w_scale=2 ** -15)
    # choose t so that w_t = 0.1
    t = round(math.log(T16) / 0.1 ** 2)
    assert classify_bandit(q, t, math.pi / 2, cfg) is BRegion.K
    with pytest.raises(ValueError):
        classify_bandit(q, t, 0.1, cfg)


@pytest.mark.parametrize("region, offset, role, arm", [
    (BRegion.H, 2, "A", 3), (BRegion.H, 2, "B", 2), (BRegion.E, 3, "A", 1),
    (BRegion.E, 3, "B", 2), (BRegion.K, 1, "B", 2), (BRegion.F, 1, "A", 2), (BRegion.F, 4, "B", 3),
])
def test_table_lookup(region, offset, role, arm):
    assert table_lookup(region, offset, role) == arm


def test_table_lookup_range():
    with pytest.raises(ValueError):
        table_lookup(BRegion.E, 5, "A")


def test_play_table_structure():
    for region, row in PLAY_TABLE.items():
        assert all(a != b for a, b in row)
        if region in EXPLORATION_REGIONS:
            for k in (0, 1):
                assert {cell[k] for cell in row} == {1, 2, 3}
        else:
            for k in (0, 1):
                assert row[0][k] == row[1][k] and row[2][k] == row[3][k]


@pytest.mark.parametrize("u, v, expected", [
    (BRegion.E, BRegion.F, True), (BRegion.E, BRegion.I, False), (BRegion.H, BRegion.H, True),
])
def test_compatibility_examples(u, v, expected):
    assert compatible(u, v) is expected


def test_compatibility_graph_matches_table_on_all_pairs():
    for u in BRegion:
        for v in BRegion:
            assert compatible(u, v) == compatible_by_table(u, v) == compatible(v, u)


def test_update_estimate():
    s = BanditPlayerState("A")
    assert np.array_equal(s.q, np.zeros(3))
    for bit in (1, 0, 1):
        update_estimate(s, 2, bit)
    assert s.n[1] == 3 and s.q[1] == pytest.approx(2 / 3)
    assert s.n[0] == 0 and s.q[0] == 0.0
    with pytest.raises(ValueError):
        update_estimate(s, 1, 2)


def test_block_region_frozen_within_block():
    cfg = BanditConfig(1024, w_scale=2 ** -15 * 0.01)
    a = BanditPlayerState("A")
    # q in F for Theta = 2.0: theta < Theta, between w/2 and 3w/2 from P
    q = from_cylindrical(CylPoint(0.5, 0.3, 1.96))
    a.n[:] = 100
    a.sums[:] = np.asarray(q) * 100
    assert bandit_act(a, 5, 2.0, cfg) == 2 and a.block_region is BRegion.F
    # move q far away; rounds 6..8 still follow row F
    a.sums[:] = np.array([0.1, 0.9, 0.5]) * 100
    assert [bandit_act(a, t, 2.0, cfg) for t in (6, 7, 8)] == [3, 1, 1]
    assert a.block_region is BRegion.F
    bandit_act(a, 9, 2.0, cfg)
    assert a.block_region is not BRegion.F


def test_bob_block_play():
    cfg = BanditConfig(1024, w_scale=2 ** -15 * 0.01)
    b = BanditPlayerState("B")
    b.block_region = BRegion.F
    b.n[:] = 100
    b.sums[:] = np.asarray(from_cylindrical(CylPoint(0.5, 0.3, 1.96))) * 100
    assert [bandit_act(b, t, 2.0, cfg) for t in (5, 6, 7, 8)] == [1, 1, 2, 3]


@settings(max_examples=300)
@given(st.tuples(unit, unit, unit), st.floats(math.pi / 3, math.pi), st.floats(1e-3, 2.0))
def test_partition_total(p, Theta, w):
    _, r, theta = cylindrical(np.array(p))
    pred = bandit_predicates(r, theta, Theta, w)
    assert sum(bool(v) for v in pred.values()) == 1


@settings(max_examples=300)
@given(st.tuples(unit, unit, unit), st.floats(math.pi / 3, math.pi), st.floats(1e-3, 2.0))
def test_oracle_play_never_collides(p, Theta, w):
    _, r, theta = cylindrical(np.array(p))
    region = BRegion(int(classify_bandit_array(r, theta, Theta, w)))
    for a, b in PLAY_TABLE[region]:
        assert a != b


def test_exploitation_regions_grow_as_padding_shrinks():
    rng = np.random.default_rng(4)
    q = rng.random((50_000, 3))
    Theta = rng.uniform(math.pi / 3, math.pi, len(q))
    _, r, theta = cylindrical(q)
    before = classify_bandit_array(r, theta, Theta, 0.2)
    after = classify_bandit_array(r, theta, Theta, 0.1)
    for region in (BRegion.E, BRegion.G, BRegion.I, BRegion.K):
        moved = (before == region) & (after != region)
        assert not moved.any()


def test_interface_draw_modes():
    grid = BanditConfig(1000, theta_mode="grid")
    for seed in range(50):
        rng = np.random.default_rng(seed)
        th = draw_interface(rng, grid)
        assert math.pi / 3 <= th <= math.pi
        assert th * 1000 == pytest.approx(round(th * 1000), abs=1e-9)
    th = draw_interface(np.random.default_rng(0), BanditConfig(1000))
    assert math.pi / 3 <= th <= math.pi


def test_omega_radius():
    assert bandit.omega_radius(0, T16, 1.0) == pytest.approx(w_bandit(5, BanditConfig(T16)) / 32)
    assert bandit.omega_radius(3, T16, 2.0) == pytest.approx(2 * w_bandit(17, BanditConfig(T16)) / 32)
