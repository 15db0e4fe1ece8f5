"""Instance generators: uniform, literal, and the circle family with reinforced angles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import Instance
from .geometry import TWO_PI, cartesian, normalize_angle

DEFAULT_EPS = 0.2
CENTERS = (math.pi / 3.0, math.pi, 5.0 * math.pi / 3.0)


@dataclass(frozen=True)
class HardInstanceConfig:
    T: int
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not 0.0 < self.eps < 0.25:
            raise ValueError(f"eps must lie in (0, 1/4), got {self.eps}")
        if self.T < 2:
            raise ValueError("horizon must be at least 2")
        if not self.delta < math.pi / 6.0:
            raise ValueError(f"T^(-1/2+2eps) = {self.delta:.4g} must be below pi/6")
        if self.T ** -self.eps > 0.5:
            raise ValueError(f"T^-eps = {self.T ** -self.eps:.4g} exceeds 1/2; means would leave [0, 1]")

    @property
    def delta(self) -> float:
        """Angular scale ``T^(-1/2 + 2 eps)``."""
        return self.T ** (-0.5 + 2.0 * self.eps)

    @property
    def half_width(self) -> float:
        return 2.0 * self.delta

    @property
    def radius(self) -> float:
        return math.sqrt(1.5) * self.T ** (-self.eps)

    @property
    def reinforced_length(self) -> float:
        return 3 * 2.0 * self.half_width

    @property
    def reinforced_mass(self) -> float:
        """Closed-form probability that a draw lands in the reinforced set."""
        return 0.5 + self.reinforced_length / (4.0 * math.pi)


def in_reinforced_set(theta, config: HardInstanceConfig):
    theta = np.asarray(theta, dtype=float)
    hw = config.half_width
    out = np.zeros(theta.shape, dtype=bool)
    for c in CENTERS:
        d = np.abs(np.mod(theta - c + math.pi, TWO_PI) - math.pi)
        out |= d <= hw
    return out


def sample_hard_theta(config: HardInstanceConfig, rng: np.random.Generator, size=None):
    """Uniform on the circle with probability 1/2, else uniform on the three reinforced intervals."""
    hw = config.half_width
    shape = () if size is None else size
    coin = rng.random(shape) < 0.5
    uniform = rng.uniform(0.0, TWO_PI, shape)
    which = rng.integers(0, 3, shape)
    local = rng.uniform(-hw, hw, shape)
    reinforced = np.asarray(CENTERS)[which] + local
    theta = np.mod(np.where(coin, uniform, reinforced), TWO_PI)
    return float(theta) if size is None else theta


def hard_instance(theta: float, config: HardInstanceConfig) -> Instance:
    p = cartesian(0.5, config.radius, normalize_angle(theta))
    return Instance(tuple(float(x) for x in p))


def interval_labels(theta: float, config: HardInstanceConfig) -> list:
    """Names of the diagnostic sub-intervals (``I1``, ``I12``, ...) containing ``theta``."""
    th = normalize_angle(theta)
    d, hw = config.delta, config.half_width
    labels = []
    for name, c in zip(("I1", "I2", "I3"), CENTERS):
        if abs((th - c + math.pi) % TWO_PI - math.pi) <= hw:
            labels.append(name)
    if CENTERS[0] + d <= th <= CENTERS[1] - d:
        labels.append("I12")
    if CENTERS[1] + d <= th <= CENTERS[2] - d:
        labels.append("I23")
    if th >= CENTERS[2] + d or th <= CENTERS[0] - d:
        labels.append("I31")
    return labels


def random_instance(rng: np.random.Generator) -> Instance:
    return Instance(tuple(float(x) for x in rng.random(3)))


def fixed_instance(p1: float, p2: float, p3: float) -> Instance:
    return Instance((p1, p2, p3))


@dataclass(frozen=True)
class InstanceSpec:
    """Parsed ``--instance`` value: ``random``, ``fixed:p1,p2,p3`` or ``hard:eps``."""

    kind: str
    p: tuple = ()
    eps: float = DEFAULT_EPS

    def draw(self, T: int, rng: np.random.Generator):
        """Returns ``(instance, theta)``; theta is the circle angle for hard instances, else None."""
        if self.kind == "random":
            return random_instance(rng), None
        if self.kind == "fixed":
            return fixed_instance(*self.p), None
        config = HardInstanceConfig(T, self.eps)
        theta = sample_hard_theta(config, rng)
        return hard_instance(theta, config), theta

    def validate(self, T: int):
        if self.kind == "hard":
            HardInstanceConfig(T, self.eps)

    def __str__(self):
        if self.kind == "fixed":
            return "fixed:" + ",".join(repr(x) for x in self.p)
        if self.kind == "hard":
            return f"hard:{self.eps!r}"
        return "random"


def parse_instance_spec(text: str) -> InstanceSpec:
    text = text.strip()
    if text == "random":
        return InstanceSpec("random")
    kind, sep, rest = text.partition(":")
    if kind == "fixed" and sep:
        try:
            p = tuple(float(x) for x in rest.split(","))
        except ValueError:
            raise ValueError(f"bad fixed instance {text!r}") from None
        if len(p) != 3:
            raise ValueError("a fixed instance needs three comma-separated means")
        fixed_instance(*p)
        return InstanceSpec("fixed", p=p)
    if kind == "hard":
        eps = DEFAULT_EPS
        if sep:
            try:
                eps = float(rest)
            except ValueError:
                raise ValueError(f"bad eps in {text!r}") from None
        if not 0.0 < eps < 0.25:
            raise ValueError(f"eps must lie in (0, 1/4), got {eps}")
        return InstanceSpec("hard", eps=eps)
    raise ValueError(f"unknown instance {text!r}")
