"""Cone-like domains and polar/Cartesian conversion.

Angles live on the branch [0, 2*pi). A sector is the open set
``alpha < theta < beta``; the full plane has no angular bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


def normalize_angle(theta):
    """Map angles onto [0, 2*pi). Works on scalars and arrays."""
    t = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2*pi for tiny negative inputs
    t = np.where(t >= TWO_PI, 0.0, t)
    if np.ndim(t) == 0:
        return float(t)
    return t


@dataclass(frozen=True)
class ConeDomain:
    kind: str = "fullplane"
    alpha: float = 0.0
    beta: float = TWO_PI

    def __post_init__(self):
        if self.kind not in ("fullplane", "sector"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "fullplane":
            object.__setattr__(self, "alpha", 0.0)
            object.__setattr__(self, "beta", TWO_PI)
        elif not (0.0 <= self.alpha < self.beta <= TWO_PI):
            raise ValueError(
                f"sector needs 0 <= alpha < beta <= 2pi, got ({self.alpha}, {self.beta})")

    @classmethod
    def full_plane(cls) -> "ConeDomain":
        return cls("fullplane")

    @classmethod
    def sector(cls, alpha: float, beta: float) -> "ConeDomain":
        return cls("sector", float(alpha), float(beta))

    @classmethod
    def half_plane(cls) -> "ConeDomain":
        return cls.sector(0.0, math.pi)

    @property
    def is_full_plane(self) -> bool:
        return self.kind == "fullplane"

    @property
    def opening(self) -> float:
        return self.beta - self.alpha

    def __str__(self):
        if self.is_full_plane:
            return "FullPlane"
        return f"Sector({self.alpha:.6g}, {self.beta:.6g})"


class PolarPoint(NamedTuple):
    r: float
    theta: float

    @classmethod
    def make(cls, r: float, theta: float) -> "PolarPoint":
        if r < 0:
            raise ValueError("radius must be non-negative")
        return cls(float(r), normalize_angle(theta) if r > 0 else 0.0)


class Margin(NamedTuple):
    theta: float = 0.0
    r: float = 0.0


def to_polar(x, y):
    """Cartesian -> (r, theta) with theta in [0, 2*pi) and theta = 0 at the origin.

    Scalars give a :class:`PolarPoint`; arrays give a pair of arrays.
    """
    r = np.hypot(x, y)
    theta = normalize_angle(np.arctan2(y, x))
    theta = np.where(r > 0, theta, 0.0)
    if np.ndim(r) == 0:
        return PolarPoint(float(r), float(theta))
    return r, theta


def to_cartesian(p):
    r, theta = p
    return r * np.cos(theta), r * np.sin(theta)


def contains(d: ConeDomain, p, margin=Margin()) -> bool:
    """Membership with a safety margin from the rays and from the origin.

    ``margin`` is a ``(theta, r)`` pair; both components must be >= 0.
    """
    mt, mr = margin
    if mt < 0 or mr < 0:
        raise ValueError("margin components must be non-negative")
    r, theta = p
    if r < mr:
        return False
    if d.is_full_plane:
        return True
    if r == 0:
        # the apex is on the boundary of every sector
        return False
    theta = normalize_angle(theta)
    if not (d.alpha < theta < d.beta):
        return False
    return (theta - d.alpha) >= mt and (d.beta - theta) >= mt


def contains_xy(d: ConeDomain, x: float, y: float, margin=Margin()) -> bool:
    return contains(d, to_polar(x, y), margin)
