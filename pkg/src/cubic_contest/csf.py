"""The cubic contest success function and its truncation.

P(x, y) = 1/2 + (x - y) * (c - b(x + y) + a x y)

All functions broadcast over numpy arrays so the oracle can evaluate whole
grids at once; scalar inputs return Python floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ContestError


@dataclass(frozen=True)
class ContestTechnology:
    """Parameters (a, b, c) of the cubic CSF. ``a`` may have any sign."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise ContestError(f"{name} must be finite")
        if self.b <= 0:
            raise ContestError("b must be positive")
        if self.c <= 0:
            raise ContestError("c must be positive")

    def kappa(self) -> float:
        """Target effort b/a; undefined at a = 0."""
        if self.a == 0:
            raise ContestError("kappa = b/a is undefined at a = 0")
        return self.b / self.a


class EffortProfile(NamedTuple):
    x: float
    y: float


def effort_profile(x: float, y: float) -> EffortProfile:
    if x < 0 or y < 0:
        raise ContestError("efforts must be nonnegative")
    return EffortProfile(float(x), float(y))


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def raw_probability(tech: ContestTechnology, x, y):
    """Untruncated winning probability of the player exerting ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    # x + y and x * y are commutative in floating point, so swapping the
    # arguments only flips the sign of the gap term: antisymmetry is exact.
    q = tech.c - tech.b * (x + y) + tech.a * (x * y)
    return _out(0.5 + (x - y) * q)


def raw_probability_zd(tech: ContestTechnology, x, y):
    """Same polynomial in midpoint/gap coordinates z = (x+y)/2, d = x-y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = 0.5 * (x + y)
    d = x - y
    return _out(0.5 + d * (tech.c - 2 * tech.b * z + tech.a * z * z - tech.a * d * d / 4))


def truncated_probability(tech: ContestTechnology, x, y):
    return _out(np.clip(raw_probability(tech, x, y), 0.0, 1.0))


def clamp_probability(p):
    return _out(np.clip(np.asarray(p, dtype=float), 0.0, 1.0))


def cross_partial(tech: ContestTechnology, x, y):
    """d^2 P / dx dy = 2a(x - y)."""
    return _out(2.0 * tech.a * (np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))


def in_admissible_domain(tech: ContestTechnology, x, y):
    """True where 0 < P(x, y) < 1 strictly."""
    p = np.asarray(raw_probability(tech, x, y))
    res = (p > 0.0) & (p < 1.0)
    return bool(res) if res.ndim == 0 else res


def tullock_cross_partial(r: float, x: float, y: float) -> float:
    """Cross-partial of the Tullock CSF x^r / (x^r + y^r)."""
    if r <= 0:
        raise ContestError("r must be positive")
    if x <= 0 or y <= 0:
        raise ContestError("Tullock efforts must be positive")
    xr, yr = x**r, y**r
    return r * r * x ** (r - 1) * y ** (r - 1) * (xr - yr) / (xr + yr) ** 3
