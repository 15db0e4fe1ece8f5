"""Randomized property suites for the geometry and both partitions.

Each suite returns a :class:`CheckResult` with the number of cases and the
number of violations.  The CLI command ``check-geometry`` runs all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    B_DIR, C_DIR, Q1_ANGLE, Q2_ANGLE, TWO_PI, angular_distance, cartesian,
    cylindrical, halfplane_distance,
)
from .strategies import bandit, full_info


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    violations: int
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.cases > 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: {self.cases} cases, {self.violations} violations{extra}"


def roundtrip_check(n: int, rng) -> CheckResult:
    p = rng.random((n, 3))
    m, r, theta = cylindrical(p)
    back = cartesian(m, r, theta)
    err = float(np.abs(back - p).max())
    return CheckResult("cylindrical roundtrip", n, int((np.abs(back - p) >= 1e-9).any(axis=1).sum()),
                       f"max error {err:.2e}")


def brute_force_halfplane_distance(p, phi, grid: int = 21, rounds: int = 16):
    """Distance from cube points to ``{theta = phi}`` by direct search.

    The half-plane is ``{mu * (1, 1, 1) + s * u(phi) : s >= 0}``.  The squared
    distance is convex in ``(mu, s)`` so a shrinking grid search around the
    current best point converges to the constrained minimum.
    """
    p = np.atleast_2d(np.asarray(p, dtype=float))
    phi = np.broadcast_to(np.asarray(phi, dtype=float), p.shape[:1])
    u = np.cos(phi)[:, None] * B_DIR + np.sin(phi)[:, None] * C_DIR
    ones = np.ones(3)
    mu_c = np.full(len(p), 0.5)
    s_c = np.full(len(p), 1.0)
    h_mu = np.full(len(p), 1.5)
    h_s = np.full(len(p), 1.0)
    steps = np.linspace(-1.0, 1.0, grid)
    pp, psum = (p * p).sum(axis=1), p.sum(axis=1)
    uu, usum, pu = (u * u).sum(axis=1), u.sum(axis=1), (p * u).sum(axis=1)
    for _ in range(rounds):
        mu = mu_c[:, None, None] + h_mu[:, None, None] * steps[None, :, None]
        s = np.maximum(s_c[:, None, None] + h_s[:, None, None] * steps[None, None, :], 0.0)
        # |p - mu*1 - s*u|^2 expanded term by term
        d2 = (pp[:, None, None] + 3.0 * mu * mu + uu[:, None, None] * s * s
              - 2.0 * mu * psum[:, None, None] - 2.0 * s * pu[:, None, None]
              + 2.0 * mu * s * usum[:, None, None])
        flat = d2.reshape(len(p), -1).argmin(axis=1)
        i, j = np.unravel_index(flat, (grid, grid))
        mu_c = mu[np.arange(len(p)), i, 0]
        s_c = s[np.arange(len(p)), 0, j]
        h_mu = h_mu * 4.0 / (grid - 1)
        h_s = h_s * 4.0 / (grid - 1)
    pts = mu_c[:, None] * ones + s_c[:, None] * u
    return np.sqrt(((pts - p) ** 2).sum(axis=-1))


def halfplane_oracle_check(n: int, rng) -> CheckResult:
    p = rng.random((n, 3))
    phi = rng.uniform(0.0, TWO_PI, n)
    _, r, theta = cylindrical(p)
    fast = halfplane_distance(r, theta, phi)
    slow = brute_force_halfplane_distance(p, phi)
    err = np.abs(fast - slow)
    return CheckResult("half-plane distance vs brute force", n, int((err >= 1e-6).sum()),
                       f"max error {float(err.max()):.2e}")


def _sample_partition_inputs(n: int, rng):
    """Cube points with boundary-heavy extras: axis points and points on the interface."""
    q = rng.random((n, 3))
    Theta = rng.uniform(Q1_ANGLE, Q2_ANGLE, n)
    w = np.exp(rng.uniform(math.log(1e-3), math.log(3.0), n))
    k = n // 20
    q[:k] = rng.random(k)[:, None]                  # on the axis
    _, r, theta = cylindrical(q)
    theta[k:2 * k] = Theta[k:2 * k]                 # exactly on the interface
    theta[2 * k:3 * k] = rng.choice([0.0, Q1_ANGLE, Q2_ANGLE, 5 * math.pi / 3], k)
    return r, theta, Theta, w


def fi_partition_check(n: int, rng) -> CheckResult:
    r, theta, Theta, w = _sample_partition_inputs(n, rng)
    pred = full_info.fi_predicates(r, theta, Theta, w)
    hits = sum(v.astype(int) for v in pred.values())
    return CheckResult("full-info partition totality", n, int((hits != 1).sum()))


def bandit_partition_check(n: int, rng) -> CheckResult:
    r, theta, Theta, w = _sample_partition_inputs(n, rng)
    pred = bandit.bandit_predicates(r, theta, Theta, w)
    hits = sum(v.astype(int) for v in pred.values())
    return CheckResult("bandit partition totality", n, int((hits != 1).sum()))


def _close_pairs(n: int, rng, reach: float = 1.5):
    """Pairs ``(x, y)`` with ``|x - y| < reach * w`` for a random padding ``w``."""
    x = rng.random((n, 3))
    w = np.exp(rng.uniform(math.log(5e-3), math.log(0.5), n))
    # half the base points sit within 4w of the axis, where all regions meet
    near = rng.random(n) < 0.5
    axial = cartesian(rng.uniform(0.2, 0.8, n), 4 * w * rng.random(n), rng.uniform(0, TWO_PI, n))
    x = np.where(near[:, None], axial, x)
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    y = x + direction * (reach * w * rng.random(n) ** (1 / 3))[:, None]
    Theta = rng.uniform(Q1_ANGLE, Q2_ANGLE, n)
    return x, y, w, Theta


def fi_separation_check(n: int, rng, batch: int = 200_000) -> CheckResult:
    far = {(full_info.FIRegion.A, full_info.FIRegion.D), (full_info.FIRegion.A, full_info.FIRegion.C),
           (full_info.FIRegion.B, full_info.FIRegion.D)}
    lut = np.zeros((4, 4), dtype=bool)
    for u, v in far:
        lut[u, v] = lut[v, u] = True
    return _separation("full-info separation (non-neighboring regions)", n, rng, batch,
                       full_info.classify_fi_array, lut)


def bandit_separation_check(n: int, rng, batch: int = 200_000) -> CheckResult:
    lut = np.array([[not bandit.compatible(u, v) for v in bandit.BRegion] for u in bandit.BRegion])
    return _separation("bandit separation (incompatible regions)", n, rng, batch,
                       bandit.classify_bandit_array, lut)


def _separation(name, n, rng, batch, classify, lut, max_draws=200):
    """Draw close pairs until ``n`` of them land in a forbidden region pair."""
    found = violations = draws = 0
    while found < n and draws < max_draws:
        draws += 1
        x, y, w, Theta = _close_pairs(batch, rng)
        _, rx, tx = cylindrical(x)
        _, ry, ty = cylindrical(y)
        cx = classify(rx, tx, Theta, w)
        cy = classify(ry, ty, Theta, w)
        forbidden = lut[cx, cy]
        dist = np.linalg.norm(x - y, axis=1)
        found += int(forbidden.sum())
        violations += int((forbidden & (dist < w)).sum())
    detail = "" if found >= n else f"only {found} forbidden pairs found"
    return CheckResult(name, found, violations if found >= n else violations + 1, detail)


def compatibility_check() -> CheckResult:
    bad = sum(bandit.compatible(u, v) != bandit.compatible_by_table(u, v)
              for u in bandit.BRegion for v in bandit.BRegion)
    return CheckResult("compatibility graph vs play table", 49, int(bad))


def counting_bound_check(T: int = 2 ** 14, w_scale: float = 1.0, n_r: int = 100,
                         n_theta: int = 360) -> CheckResult:
    """Rounds whose dynamic interface passes within ``pi * w_t / r`` of a fixed angle."""
    config = full_info.FIConfig(T, w_scale=w_scale, interface="dynamic")
    t = np.arange(1, T + 1)
    theta_t = full_info.dynamic_theta(t)
    w = full_info._padding(t, T, w_scale)
    total_w = float(w.sum())
    radii = np.linspace(0.0, math.sqrt(6.0) / 2.0, n_r + 1)[1:]
    angles = np.arange(n_theta) * (TWO_PI / n_theta)
    gap = angular_distance(angles[:, None], theta_t[None, :])
    violations = 0
    for r in radii:
        count = (gap <= math.pi * w[None, :] / r).sum(axis=1)
        violations += int((count > 3.0 / r * total_w).sum())
    return CheckResult(f"dynamic interface counting bound (T={config.T}, w_scale={w_scale:g})",
                       n_r * n_theta, violations)


def run_all(seed: int = 0, scale: float = 1.0) -> list:
    """All suites; ``scale`` shrinks case counts for quick runs."""
    rng = np.random.default_rng(seed)

    def n(x):
        return max(100, int(x * scale))

    return [
        roundtrip_check(n(100_000), rng),
        halfplane_oracle_check(n(10_000), rng),
        fi_partition_check(n(1_000_000), rng),
        bandit_partition_check(n(1_000_000), rng),
        fi_separation_check(n(100_000), rng),
        bandit_separation_check(n(100_000), rng),
        compatibility_check(),
        counting_bound_check(),
    ]
