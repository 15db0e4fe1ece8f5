import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coordbandit.checks import brute_force_halfplane_distance
from coordbandit.geometry import (
    B_DIR, C_DIR,
    Q1, Q3, CubePoint, CylPoint, HalfPlane, angular_distance, cartesian, cylindrical, dist_to_halfplane,
    dist_to_halfplane_union, from_cylindrical, normalize_angle, pair_optimum, to_cylindrical,
    top_pair_sector,
)

R0 = math.sqrt(6) / 10  # distance of (0.4, 0.7, 0.4) to the axis

unit = st.floats(0.0, 1.0, allow_nan=False)
cube_points = st.tuples(unit, unit, unit)


def test_axis_point_has_zero_radius_and_angle():
    c = to_cylindrical((0.5, 0.5, 0.5))
    assert c.m == pytest.approx(0.5)
    assert c.r == 0.0 and c.theta == 0.0


@pytest.mark.parametrize("p, theta", [
    ((0.4, 0.7, 0.4), 0.0),
    ((0.4, 0.4, 0.7), 2 * math.pi / 3),
    ((0.7, 0.4, 0.4), 4 * math.pi / 3),
])
def test_to_cylindrical_examples(p, theta):
    c = to_cylindrical(p)
    assert c.m == pytest.approx(0.5, abs=1e-12)
    assert c.r == pytest.approx(R0, abs=1e-12)
    assert c.theta == pytest.approx(theta, abs=1e-12)


def test_radius_is_distance_to_axis():
    dev = np.array([-0.1, 0.2, -0.1])
    assert to_cylindrical((0.4, 0.7, 0.4)).r == pytest.approx(np.linalg.norm(dev))


def test_from_cylindrical_examples():
    assert from_cylindrical(CylPoint(0.5, 0.0, 1.234)) == pytest.approx((0.5, 0.5, 0.5))
    assert from_cylindrical(CylPoint(0.5, R0, 2 * math.pi / 3)) == pytest.approx((0.4, 0.4, 0.7), abs=1e-12)


def test_from_cylindrical_flags_points_outside_cube():
    p = from_cylindrical(CylPoint(0.9, 0.5, 0.0))
    assert isinstance(p, CubePoint)
    assert not p.in_cube
    assert from_cylindrical(CylPoint(0.5, 0.1, 0.3)).in_cube


def test_roundtrip_many_points():
    rng = np.random.default_rng(3)
    p = rng.random((100_000, 3))
    m, r, theta = cylindrical(p)
    assert np.abs(cartesian(m, r, theta) - p).max() < 1e-9
    single = np.array([from_cylindrical(CylPoint(*x)) for x in zip(m[:50], r[:50], theta[:50])])
    assert np.abs(single - p[:50]).max() < 1e-9


@given(cube_points)
def test_roundtrip_property(p):
    c = to_cylindrical(p)
    assert 0.0 <= c.theta < 2 * math.pi
    assert c.r >= 0.0
    assert np.allclose(from_cylindrical(c), p, atol=1e-9)


def test_cylpoint_invariants():
    with pytest.raises(ValueError):
        CylPoint(0.5, -0.1, 0.0)
    assert CylPoint(0.5, 0.0, 2.0).theta == 0.0
    assert CylPoint(0.5, 0.1, -math.pi / 2).theta == pytest.approx(3 * math.pi / 2)
    assert HalfPlane(7 * math.pi / 3).phi == pytest.approx(math.pi / 3)


def test_normalize_angle_never_returns_two_pi():
    assert normalize_angle(-1e-18) == 0.0
    assert normalize_angle(2 * math.pi) == 0.0


@pytest.mark.parametrize("p, star", [((0.1, 0.2, 0.9), 0.3), ((0.5, 0.5, 0.5), 1.0), ((0.4, 0.7, 0.4), 0.8)])
def test_pair_optimum(p, star):
    assert pair_optimum(p) == pytest.approx(star)


@given(cube_points, cube_points)
def test_pair_optimum_is_2_lipschitz(x, y):
    lhs = abs(pair_optimum(x) - pair_optimum(y))
    assert lhs <= 2 * np.linalg.norm(np.subtract(x, y)) + 1e-12


@pytest.mark.parametrize("a, b, d", [(0, 0, 0), (math.pi / 6, 11 * math.pi / 6, math.pi / 3), (0, math.pi, math.pi)])
def test_angular_distance(a, b, d):
    assert angular_distance(a, b) == pytest.approx(d)


def test_halfplane_distance_examples():
    assert dist_to_halfplane(CylPoint(0.5, R0, 1.0), HalfPlane(1.0)) == 0.0
    assert dist_to_halfplane(CylPoint(0.5, R0, math.pi / 6), HalfPlane(0.0)) == pytest.approx(math.sqrt(6) / 20)
    assert dist_to_halfplane(CylPoint(0.5, R0, 2 * math.pi / 3), HalfPlane(0.0)) == pytest.approx(R0)


@pytest.mark.parametrize("p, phi", [
    ((0.4, 0.7, 0.4), math.pi / 6),
    ((0.4, 0.7, 0.4), 2 * math.pi / 3),
    ((0.1, 0.8, 0.3), 4.0),
])
def test_halfplane_distance_matches_brute_force(p, phi):
    c = to_cylindrical(p)
    slow = brute_force_halfplane_distance(np.array([p]), phi)[0]
    assert dist_to_halfplane(c, HalfPlane(phi)) == pytest.approx(slow, abs=1e-9)


def test_brute_force_oracle_by_dense_sampling():
    # independent check of the search itself: dense sampling of the half-plane
    p = np.array([0.2, 0.9, 0.4])
    phi = 2.5
    u = math.cos(phi) * B_DIR + math.sin(phi) * C_DIR
    mu, s = np.meshgrid(np.linspace(-1, 2, 1201), np.linspace(0, 2, 801), indexing="ij")
    pts = mu[..., None] + s[..., None] * u
    dense = np.sqrt(((pts - p) ** 2).sum(-1)).min()
    assert brute_force_halfplane_distance(p, phi)[0] == pytest.approx(dense, abs=2e-3)


def test_halfplane_union_examples():
    on_q3 = CylPoint(0.5, 0.3, 5 * math.pi / 3)
    assert dist_to_halfplane_union(on_q3, [HalfPlane(math.pi / 2), Q3]) == 0.0
    assert dist_to_halfplane_union(CylPoint(0.5, 0.0, 0.0), [Q1, Q3]) == 0.0
    got = dist_to_halfplane_union(CylPoint(0.5, 0.4, 5 * math.pi / 6), [HalfPlane(math.pi / 2), Q3])
    assert got == pytest.approx(0.34641, abs=1e-5)
    with pytest.raises(ValueError):
        dist_to_halfplane_union(on_q3, [])


@settings(max_examples=200)
@given(cube_points, st.floats(-0.3, 0.3), st.floats(0, 2 * math.pi, exclude_max=True))
def test_halfplane_distance_ignores_mean_level(p, shift, phi):
    a = to_cylindrical(p)
    b = CylPoint(a.m + shift, a.r, a.theta)
    assert dist_to_halfplane(a, HalfPlane(phi)) == pytest.approx(dist_to_halfplane(b, HalfPlane(phi)))


def test_top_pair_sectors():
    rng = np.random.default_rng(5)
    p = rng.random((20_000, 3))
    _, _, theta = cylindrical(p)
    worst = p.argmax(axis=1) + 1
    sector = np.where((theta >= math.pi / 3) & (theta <= math.pi), 3,
                      np.where((theta >= math.pi) & (theta <= 5 * math.pi / 3), 1, 2))
    assert np.array_equal(worst, sector)
    assert np.array_equal(top_pair_sector(theta), worst)


@pytest.mark.parametrize("p, theta", [
    ((0.2, 0.2, 0.6), 2 * math.pi / 3), ((0.6, 0.6, 0.2), 5 * math.pi / 3),
    ((0.1, 0.5, 0.5), math.pi / 3), ((0.9, 0.5, 0.5), 4 * math.pi / 3),
    ((0.3, 0.8, 0.3), 0.0), ((0.6, 0.1, 0.6), math.pi),
])
def test_ties_land_exactly_on_boundary_angles(p, theta):
    assert to_cylindrical(p).theta == theta


def test_vectorised_equals_scalar():
    rng = np.random.default_rng(9)
    q = np.round(rng.random((500, 3)) * 7) / 7  # many exact ties
    m, r, theta = cylindrical(q)
    for i in range(len(q)):
        c = to_cylindrical(q[i])
        assert (c.m, c.r, c.theta) == (m[i], r[i], theta[i])
