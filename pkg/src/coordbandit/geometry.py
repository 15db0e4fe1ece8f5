"""Cylindrical coordinates of the loss cube around the diagonal axis.

A point ``p = (p1, p2, p3)`` is written ``[m, r, theta]`` where ``m`` is the
mean coordinate, ``r`` the Euclidean distance to the axis ``p1 = p2 = p3`` and
``theta`` the angle measured from the half-line pointing along
``b = sqrt(2/3) * (-1/2, 1, -1/2)``.  The orientation is fixed so that

    p_j = m + sqrt(2/3) * r * cos(theta + offset_j),  offsets (2pi/3, 0, -2pi/3)

which puts the "arm 3 is worst" sector at ``theta in [pi/3, pi]``.

Every function accepts scalars or numpy arrays and broadcasts; the dataclass
wrappers are for single points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
SQRT_2_3 = math.sqrt(2.0 / 3.0)
OFFSETS = np.array([2.0 * math.pi / 3.0, 0.0, -2.0 * math.pi / 3.0])

# orthonormal frame: axis, theta = 0 direction, theta = pi/2 direction
AXIS = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
B_DIR = SQRT_2_3 * np.array([-0.5, 1.0, -0.5])
C_DIR = SQRT_2_3 * np.array([-math.sqrt(3.0) / 2.0, 0.0, math.sqrt(3.0) / 2.0])

# fixed half-plane angles used by both partitions
Q1_ANGLE = math.pi / 3.0
Q2_ANGLE = math.pi
Q3_ANGLE = 5.0 * math.pi / 3.0


def normalize_angle(theta):
    """Map angles into ``[0, 2pi)``."""
    out = np.mod(theta, TWO_PI)
    # np.mod of a tiny negative number rounds up to exactly 2pi
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


class CubePoint(NamedTuple):
    p1: float
    p2: float
    p3: float

    @property
    def in_cube(self) -> bool:
        return all(0.0 <= x <= 1.0 for x in self)


@dataclass(frozen=True)
class CylPoint:
    m: float
    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"negative radius {self.r}")
        theta = 0.0 if self.r == 0 else normalize_angle(self.theta)
        object.__setattr__(self, "theta", float(theta))


@dataclass(frozen=True)
class HalfPlane:
    """Half-plane ``{theta = phi}`` bounded by the diagonal axis."""

    phi: float

    def __post_init__(self):
        object.__setattr__(self, "phi", float(normalize_angle(self.phi)))


Q1 = HalfPlane(Q1_ANGLE)
Q2 = HalfPlane(Q2_ANGLE)
Q3 = HalfPlane(Q3_ANGLE)


def cylindrical(p):
    """Vectorised ``to_cylindrical``: ``p`` has shape ``(..., 3)``.

    Returns ``(m, r, theta)`` arrays.  Points exactly on the axis get
    ``r = 0`` and ``theta = 0``.  Points with two exactly equal coordinates
    lie on one of the six tie half-planes and get the exact angle constant,
    so sector tests on empirical means (where ties are common) do not depend
    on rounding.  Everything is elementwise so results never depend on the
    array shape.
    """
    p = np.asarray(p, dtype=float)
    p1, p2, p3 = p[..., 0], p[..., 1], p[..., 2]
    m = (p1 + p2 + p3) / 3.0
    d1, d2, d3 = p1 - m, p2 - m, p3 - m
    x = SQRT_2_3 * (d2 - 0.5 * (d1 + d3))
    y = SQRT_2_3 * (math.sqrt(3.0) / 2.0) * (d3 - d1)
    r = np.hypot(x, y)
    theta = np.arctan2(y, x)
    theta = np.where(theta < 0, theta + TWO_PI, theta)
    theta = np.where(theta >= TWO_PI, 0.0, theta)
    theta = np.where(p1 == p3, np.where(p2 > p1, 0.0, Q2_ANGLE), theta)
    theta = np.where(p2 == p3, np.where(p1 < p2, Q1_ANGLE, 4.0 * math.pi / 3.0), theta)
    theta = np.where(p1 == p2, np.where(p3 > p1, 2.0 * math.pi / 3.0, Q3_ANGLE), theta)
    on_axis = (p1 == p2) & (p2 == p3)
    r = np.where(on_axis, 0.0, r)
    theta = np.where(on_axis | (r == 0), 0.0, theta)
    return m, r, theta


def cartesian(m, r, theta):
    """Vectorised ``from_cylindrical``; returns an array of shape ``(..., 3)``."""
    m = np.asarray(m, dtype=float)
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    angles = theta[..., None] + OFFSETS
    return m[..., None] + SQRT_2_3 * r[..., None] * np.cos(angles)


def to_cylindrical(p: Sequence[float]) -> CylPoint:
    m, r, theta = cylindrical(p)
    return CylPoint(float(m), float(r), float(theta))


def from_cylindrical(c: CylPoint) -> CubePoint:
    """Reconstruct a point; check ``.in_cube`` on the result, it is not enforced."""
    return CubePoint(*(float(v) for v in cartesian(c.m, c.r, c.theta)))


def pair_optimum(p):
    """Sum of the two smallest coordinates (the best loss a non-colliding pair can get)."""
    p = np.asarray(p, dtype=float)
    out = p.sum(axis=-1) - p.max(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def angular_distance(a, b):
    """Wrapped absolute difference of two angles, in ``[0, pi]``."""
    d = np.mod(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)), TWO_PI)
    out = np.minimum(d, TWO_PI - d)
    return float(out) if np.ndim(out) == 0 else out


def halfplane_distance(r, theta, phi):
    """Distance from ``[m, r, theta]`` to the half-plane at angle ``phi``.

    For an angular gap above pi/2 the closest point of the half-plane is on
    the axis, so the distance is ``r`` itself.
    """
    alpha = angular_distance(theta, phi)
    r = np.asarray(r, dtype=float)
    out = np.where(alpha <= math.pi / 2.0, r * np.sin(alpha), r)
    return float(out) if np.ndim(out) == 0 else out


def dist_to_halfplane(c: CylPoint, h: HalfPlane) -> float:
    return halfplane_distance(c.r, c.theta, h.phi)


def dist_to_halfplane_union(c: CylPoint, hs: Sequence[HalfPlane]) -> float:
    if not hs:
        raise ValueError("need at least one half-plane")
    return min(dist_to_halfplane(c, h) for h in hs)


def top_pair_sector(theta):
    """Arm with the largest mean loss for a point at angle ``theta``.

    Sector boundaries follow the cylindrical layout: arm 3 on ``[pi/3, pi]``,
    arm 1 on ``[pi, 5pi/3]``, arm 2 elsewhere.  Used as a cross-check of the
    coordinates, never by a strategy.
    """
    theta = np.asarray(theta, dtype=float)
    out = np.where((theta >= Q1_ANGLE) & (theta <= Q2_ANGLE), 3,
                   np.where((theta >= Q2_ANGLE) & (theta <= Q3_ANGLE), 1, 2))
    return int(out) if np.ndim(out) == 0 else out
