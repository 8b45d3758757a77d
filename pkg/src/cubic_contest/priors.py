"""IID type distributions, their moments and lower partial moments, and
signal structures inducing posterior-mean distributions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ContestError
from .special import beta_partial_moment, betainc, log_beta

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Moments:
    m1: float
    m2: float
    variance: float

    def delta(self, c: float) -> float:
        return c - self.m1


@dataclass(frozen=True)
class LowerPartialMoments:
    """F = Pr(theta <= t) (Pr(theta < t) for atoms), A = E[(t-theta)+],
    B = E[(t-theta)+^2] and D = B + 2(c-t)A."""

    t: float
    F: float
    A: float
    B: float
    D: float


class TypeDistribution:
    """Base class; concrete kinds are Degenerate, Discrete, Uniform and
    ShiftedBetaMixture."""

    kind = "abstract"

    @property
    def alpha(self) -> float:
        raise NotImplementedError

    @property
    def beta(self) -> float:
        raise NotImplementedError

    @property
    def atomless(self) -> bool:
        return False

    @property
    def atom_at_alpha(self) -> float:
        """Probability mass sitting exactly at the lower support point."""
        return 0.0

    def moments(self) -> Moments:
        raise NotImplementedError

    def _partial(self, t: float) -> tuple[float, float, float]:
        raise NotImplementedError

    def partial_array(self, ts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(F, A, B) on an array of cutoffs."""
        ts = np.asarray(ts, dtype=float)
        out = np.array([self._partial(float(t)) for t in ts.ravel()]).reshape(ts.shape + (3,))
        return out[..., 0], out[..., 1], out[..., 2]

    def check_support(self, c: float) -> None:
        if not (0 < self.alpha and self.beta < c):
            raise ContestError(f"support [{self.alpha}, {self.beta}] must lie inside (0, c={c})")

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Degenerate(TypeDistribution):
    value: float
    kind = "degenerate"

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ContestError("degenerate value must be finite")

    @property
    def alpha(self):
        return self.value

    @property
    def beta(self):
        return self.value

    @property
    def atom_at_alpha(self):
        return 1.0

    def moments(self):
        return Moments(self.value, self.value**2, 0.0)

    def _partial(self, t):
        g = max(t - self.value, 0.0)
        return (1.0 if t > self.value else 0.0), g, g * g

    def to_json(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class Discrete(TypeDistribution):
    """Finite prior. Atoms with identical values are kept distinct."""

    values: tuple
    weights: tuple
    kind = "discrete"

    def __init__(self, values: Sequence[float], weights: Sequence[float]):
        v = tuple(float(x) for x in values)
        w = tuple(float(x) for x in weights)
        if len(v) == 0 or len(v) != len(w):
            raise ContestError("discrete prior needs matching nonempty values and weights")
        if any(x <= 0 for x in w) or not all(math.isfinite(x) for x in v):
            raise ContestError("discrete weights must be positive and values finite")
        if abs(math.fsum(w) - 1.0) > WEIGHT_TOL:
            raise ContestError(f"discrete weights sum to {math.fsum(w)!r}, not 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)

    @property
    def alpha(self):
        return min(self.values)

    @property
    def beta(self):
        return max(self.values)

    @property
    def atom_at_alpha(self):
        lo = self.alpha
        return math.fsum(w for v, w in zip(self.values, self.weights) if v == lo)

    def moments(self):
        v = np.array(self.values)
        w = np.array(self.weights)
        m1 = math.fsum(w * v)
        m2 = math.fsum(w * v * v)
        var = math.fsum(w * (v - m1) ** 2)
        return Moments(m1, m2, var)

    def _partial(self, t):
        # Pr(theta < t): an atom sitting at the cutoff is not counted active.
        fs, As, Bs = [], [], []
        for v, w in zip(self.values, self.weights):
            if v < t:
                g = t - v
                fs.append(w)
                As.append(w * g)
                Bs.append(w * g * g)
        return math.fsum(fs), math.fsum(As), math.fsum(Bs)

    def to_json(self):
        return {"kind": self.kind, "atoms": [[v, w] for v, w in zip(self.values, self.weights)]}


@dataclass(frozen=True)
class Uniform(TypeDistribution):
    lo: float
    hi: float
    kind = "uniform"

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ContestError("uniform prior needs alpha < beta")

    @property
    def alpha(self):
        return self.lo

    @property
    def beta(self):
        return self.hi

    @property
    def atomless(self):
        return True

    def moments(self):
        h = self.hi - self.lo
        m1 = 0.5 * (self.lo + self.hi)
        var = h * h / 12.0
        return Moments(m1, var + m1 * m1, var)

    def _partial(self, t):
        h = self.hi - self.lo
        if t <= self.lo:
            return 0.0, 0.0, 0.0
        if t <= self.hi:
            g = t - self.lo
            return g / h, g * g / (2 * h), g**3 / (3 * h)
        m = self.moments()
        g = t - m.m1
        return 1.0, g, g * g + m.variance

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.where((theta >= self.lo) & (theta <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def to_json(self):
        return {"kind": self.kind, "alpha": self.lo, "beta": self.hi}


@dataclass(frozen=True)
class BetaComponent:
    weight: float
    p: float
    q: float


@dataclass(frozen=True)
class ShiftedBetaMixture(TypeDistribution):
    """theta = alpha + (beta - alpha) Z with Z a finite mixture of Beta(p_j, q_j)."""

    lo: float
    hi: float
    components: tuple
    kind = "beta_mixture"

    def __init__(self, lo: float, hi: float, components):
        comps = tuple(c if isinstance(c, BetaComponent) else BetaComponent(*map(float, c))
                      for c in components)
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ContestError("beta mixture needs alpha < beta")
        if not comps:
            raise ContestError("beta mixture needs at least one component")
        if any(c.weight <= 0 or c.p <= 0 or c.q <= 0 for c in comps):
            raise ContestError("beta mixture weights and shapes must be positive")
        total = math.fsum(c.weight for c in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ContestError(f"beta mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "lo", float(lo))
        object.__setattr__(self, "hi", float(hi))
        object.__setattr__(self, "components", comps)

    @property
    def alpha(self):
        return self.lo

    @property
    def beta(self):
        return self.hi

    @property
    def atomless(self):
        return True

    def unit_moments(self) -> tuple[float, float]:
        ez = math.fsum(c.weight * c.p / (c.p + c.q) for c in self.components)
        ez2 = math.fsum(c.weight * c.p * (c.p + 1) / ((c.p + c.q) * (c.p + c.q + 1))
                        for c in self.components)
        return ez, ez2

    def moments(self):
        h = self.hi - self.lo
        ez, ez2 = self.unit_moments()
        # Var Z from central component moments avoids cancellation in ez2 - ez^2.
        var_z = math.fsum(
            c.weight * (c.p * c.q / ((c.p + c.q) ** 2 * (c.p + c.q + 1))
                        + (c.p / (c.p + c.q) - ez) ** 2)
            for c in self.components)
        m1 = self.lo + h * ez
        var = h * h * var_z
        return Moments(m1, var + m1 * m1, var)

    def unit_partial(self, s):
        """(F, A, B) on the unit scale at normalized cutoff s, vectorized."""
        s = np.minimum(np.asarray(s, dtype=float), 1.0)
        s = np.maximum(s, 0.0)
        F = np.zeros_like(s)
        A = np.zeros_like(s)
        B = np.zeros_like(s)
        for c in self.components:
            i0 = beta_partial_moment(c.p, c.q, s, 0)
            i1 = beta_partial_moment(c.p, c.q, s, 1)
            i2 = beta_partial_moment(c.p, c.q, s, 2)
            F = F + c.weight * i0
            A = A + c.weight * (s * i0 - i1)
            B = B + c.weight * (s * s * i0 - 2 * s * i1 + i2)
        return F, A, B

    def partial_array(self, ts):
        ts = np.asarray(ts, dtype=float)
        h = self.hi - self.lo
        F, A, B = self.unit_partial((ts - self.lo) / h)
        A, B = A * h, B * h * h
        above = ts > self.hi
        if above.any():
            m = self.moments()
            g = ts[above] - m.m1
            F[above], A[above], B[above] = 1.0, g, g * g + m.variance
        return F, A, B

    def _partial(self, t):
        h = self.hi - self.lo
        if t <= self.lo:
            return 0.0, 0.0, 0.0
        if t >= self.hi:
            m = self.moments()
            g = t - m.m1
            return 1.0, g, g * g + m.variance
        F, A, B = self.unit_partial((t - self.lo) / h)
        return float(F), float(A) * h, float(B) * h * h

    def cdf(self, theta):
        s = np.clip((np.asarray(theta, dtype=float) - self.lo) / (self.hi - self.lo), 0, 1)
        out = sum(c.weight * betainc(c.p, c.q, s) for c in self.components)
        return out

    def pdf(self, theta):
        h = self.hi - self.lo
        z = (np.asarray(theta, dtype=float) - self.lo) / h
        inside = (z > 0) & (z < 1)
        zc = np.where(inside, z, 0.5)
        lz, l1z = np.log(zc), np.log1p(-zc)
        dens = 0.0
        for c in self.components:
            dens = dens + np.exp((c.p - 1) * lz + (c.q - 1) * l1z + (math.log(c.weight) - log_beta(c.p, c.q)))
        return np.where(inside, dens / h, 0.0)

    def to_json(self):
        return {"kind": self.kind, "alpha": self.lo, "beta": self.hi,
                "components": [[c.weight, c.p, c.q] for c in self.components]}


def moments(dist: TypeDistribution) -> Moments:
    return dist.moments()


def lower_partial(dist: TypeDistribution, t: float, c: float) -> LowerPartialMoments:
    """Lower partial moments at cutoff t in [alpha, c]."""
    if not (dist.alpha <= t <= c):
        raise ContestError(f"cutoff t={t!r} outside [alpha={dist.alpha}, c={c}]")
    F, A, B = dist._partial(t)
    return LowerPartialMoments(t, F, A, B, B + 2 * (c - t) * A)


# ---------------------------------------------------------------- signals

@dataclass(frozen=True)
class NoDisclosure:
    kind = "none"


@dataclass(frozen=True)
class FullDisclosure:
    kind = "full"


@dataclass(frozen=True)
class Garbling:
    """Row-stochastic matrix G[i, s] = Pr(signal s | atom i)."""

    matrix: np.ndarray

    def __init__(self, matrix):
        g = np.array(matrix, dtype=float)
        if g.ndim != 2 or np.any(g < 0):
            raise ContestError("garbling must be a nonnegative matrix")
        if np.any(np.abs(g.sum(axis=1) - 1.0) > WEIGHT_TOL):
            raise ContestError("garbling rows must sum to 1")
        g.setflags(write=False)
        object.__setattr__(self, "matrix", g)

    def then(self, other: "Garbling") -> "Garbling":
        """Further garble the signal of ``self`` by ``other`` (a coarser signal)."""
        return Garbling(self.matrix @ other.matrix)

    def __eq__(self, other):
        return isinstance(other, Garbling) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


SignalStructure = NoDisclosure | FullDisclosure | Garbling


def posterior_mean_distribution(dist: TypeDistribution, signal) -> TypeDistribution:
    """Distribution of E[theta | signal]."""
    if isinstance(signal, NoDisclosure):
        return Degenerate(dist.moments().m1)
    if isinstance(signal, FullDisclosure):
        return dist
    if not isinstance(signal, Garbling):
        raise ContestError(f"unknown signal structure {signal!r}")
    if not isinstance(dist, Discrete):
        raise ContestError("garblings are defined for discrete priors only")
    g = signal.matrix
    if g.shape[0] != len(dist.values):
        raise ContestError(f"garbling has {g.shape[0]} rows for {len(dist.values)} atoms")
    w = np.array(dist.weights)
    v = np.array(dist.values)
    joint = w[:, None] * g
    pi = joint.sum(axis=0)
    keep = pi > 0
    means = (joint * v[:, None]).sum(axis=0)[keep] / pi[keep]
    pi = pi[keep]
    if len(pi) == 1:
        return Degenerate(float(means[0]))
    pi = pi / math.fsum(pi)
    return Discrete(means, pi)


# ---------------------------------------------------------------- JSON

def from_json(obj: dict) -> TypeDistribution:
    try:
        kind = obj["kind"]
        if kind == "degenerate":
            return Degenerate(float(obj["value"]))
        if kind == "discrete":
            atoms = obj["atoms"]
            return Discrete([a[0] for a in atoms], [a[1] for a in atoms])
        if kind == "uniform":
            return Uniform(float(obj["alpha"]), float(obj["beta"]))
        if kind == "beta_mixture":
            return ShiftedBetaMixture(float(obj["alpha"]), float(obj["beta"]),
                                      [tuple(map(float, c)) for c in obj["components"]])
    except (KeyError, TypeError, IndexError) as exc:
        raise ContestError(f"malformed distribution JSON: {exc!r}") from exc
    raise ContestError(f"unknown distribution kind {obj.get('kind')!r}")


def to_json(dist: TypeDistribution) -> dict:
    return dist.to_json()
