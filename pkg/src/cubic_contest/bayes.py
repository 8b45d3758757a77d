"""Bayesian equilibria with IID private costs.

The affine benchmark x(theta) = k theta + d ignores the nonnegativity
constraint; the constrained game adds a cutoff-affine branch with dropout
and a boundary-atom branch for priors with an atom at the lowest cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContestError, SolverError
from .priors import Discrete, TypeDistribution, lower_partial
from .roots import bisect, sign_change_brackets

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class AffineParts:
    """Stable building blocks of the affine solution for given moments."""

    R2: float   # 2 (a E1 - b)^2
    S: float    # sqrt((b^2 - a Delta)^2 + sigma^2 a^2)
    E1: float


def affine_parts(a: float, b: float, delta: float, sigma_sq: float) -> AffineParts:
    """E1 and the slope radicand without catastrophic cancellation.

    With W = b^2 - a Delta and S = sqrt(W^2 + sigma^2 a^2), the slope is
    k = -1/sqrt(2 R2) where R2 = W + S, and
        E1 = (4 b^2 Delta - a sigma^2) / (2 (b + sqrt(R2/2)) (b^2 + a Delta + S)),
    a rationalization of (b - sqrt(R2/2)) / a valid for every real a.
    """
    W = b * b - a * delta
    S = math.hypot(W, a * math.sqrt(sigma_sq)) if sigma_sq > 0 else abs(W)
    R2 = W + S if W >= 0 else (sigma_sq * a * a) / (S - W)
    r = math.sqrt(R2 / 2)
    E1 = (4 * b * b * delta - a * sigma_sq) / (2 * (b + r) * (b * b + a * delta + S))
    return AffineParts(R2, S, E1)


@dataclass(frozen=True)
class AffineBNE:
    a: float
    b: float
    c: float
    dist: TypeDistribution = field(repr=False)
    k: float
    d: float
    E1: float
    variance: float
    m1: float
    sigma_sq: float
    regime = "affine"

    @property
    def delta(self) -> float:
        return self.c - self.m1

    @property
    def E2(self) -> float:
        return self.variance + self.E1**2

    @property
    def kappa(self) -> float | None:
        return None if self.a == 0 else self.b / self.a

    @property
    def zeta(self) -> float | None:
        if self.a == 0:
            return None
        return (self.b**2 - self.a * self.delta) / self.a**2

    @property
    def omega(self) -> float | None:
        return None if self.a == 0 else self.sigma_sq / self.a**2

    @property
    def alpha(self) -> float:
        return self.dist.alpha

    @property
    def beta(self) -> float:
        return self.dist.beta

    @property
    def x_low(self) -> float:
        return self.k * self.beta + self.d

    @property
    def x_high(self) -> float:
        return self.k * self.alpha + self.d

    @property
    def dropout_rate(self) -> float:
        return 0.0

    @property
    def fully_active(self) -> bool:
        return self.x_low >= 0

    def effort(self, theta):
        return self.k * np.asarray(theta, dtype=float) + self.d

    def residuals(self) -> tuple[float, float]:
        """Moment identities a E1^2 - 2b E1 + Delta - a Var = 0 and
        Var = sigma^2 / (4 (a E1 - b)^2)."""
        a, b = self.a, self.b
        r1 = a * self.E1**2 - 2 * b * self.E1 + self.delta - a * self.variance
        r2 = self.variance - self.sigma_sq / (4 * (a * self.E1 - b) ** 2)
        return r1, r2


def affine_bne(a: float, b: float, c: float, dist: TypeDistribution) -> AffineBNE:
    """Unique affine equilibrium of the game without the nonnegativity constraint."""
    _check_tech(b, c)
    dist.check_support(c)
    mom = dist.moments()
    if mom.variance <= 0:
        if a == 0:
            # the a = 0 rule is type-by-type dominant, so it survives a point prior
            return AffineBNE(a, b, c, dist, -1 / (2 * b), c / (2 * b), (c - mom.m1) / (2 * b),
                             0.0, mom.m1, 0.0)
        raise ContestError("degenerate prior: this is a complete-information problem, "
                           "use complete_info.solve_complete")
    parts = affine_parts(a, b, c - mom.m1, mom.variance)
    k = -1 / math.sqrt(2 * parts.R2)
    var = mom.variance / (2 * parts.R2)
    d = parts.E1 - k * mom.m1
    return AffineBNE(a, b, c, dist, k, d, parts.E1, var, mom.m1, mom.variance)


@dataclass(frozen=True)
class CutoffAffine:
    """x(theta) = lam (t - theta)+; types above t exert zero effort."""

    a: float
    b: float
    c: float
    dist: TypeDistribution = field(repr=False)
    lam: float
    t: float
    E1: float
    E2: float
    dropout_rate: float
    residuals: tuple
    extra_roots: bool
    regime = "cutoff"

    @property
    def variance(self) -> float:
        return max(self.E2 - self.E1**2, 0.0)

    @property
    def k(self) -> float:
        return -self.lam

    @property
    def d(self) -> float:
        return self.lam * self.t

    def effort(self, theta):
        return self.lam * np.maximum(self.t - np.asarray(theta, dtype=float), 0.0)


@dataclass(frozen=True)
class BoundaryAtom:
    """The atom at alpha randomizes on {0, (c - alpha)/b}; all other types exert zero."""

    a: float
    b: float
    c: float
    dist: TypeDistribution = field(repr=False)
    p: float
    x_high: float
    atom_mass: float
    regime = "boundary"
    representation = "two-point {0, (c - alpha)/b}"

    @property
    def E1(self) -> float:
        return self.atom_mass * self.p * self.x_high

    @property
    def E2(self) -> float:
        return self.atom_mass * self.p * self.x_high**2

    @property
    def variance(self) -> float:
        return max(self.E2 - self.E1**2, 0.0)

    @property
    def dropout_rate(self) -> float:
        return 1.0 - self.atom_mass * self.p


BayesEquilibrium = AffineBNE | CutoffAffine | BoundaryAtom


def _check_tech(b: float, c: float) -> None:
    if not (b > 0 and c > 0):
        raise ContestError("b and c must be positive")


def H(a: float, b: float, c: float, dist: TypeDistribution, t: float) -> float:
    """2(c - t)A(t) + B(t) - 2b sqrt((c - t)B(t)/a); zero at the cutoff."""
    lp = lower_partial(dist, t, c)
    return 2 * (c - t) * lp.A + lp.B - 2 * b * math.sqrt(max(c - t, 0.0) * lp.B / a)


def _H_vec(a, b, c, dist, ts):
    _, A, B = dist.partial_array(ts)
    return 2 * (c - ts) * A + B - 2 * b * np.sqrt(np.maximum(c - ts, 0) * B / a)


def _t_grid(dist: TypeDistribution, c: float) -> np.ndarray:
    lo = dist.alpha
    span = c - lo
    if isinstance(dist, Discrete):
        pts = set()
        for v in sorted(set(dist.values)):
            pts.update([v, np.nextafter(v, np.inf)])
        g = np.concatenate([np.linspace(lo, c, 2001)[1:], np.array(sorted(pts))])
        g = g[(g > lo) & (g <= c)]
        return np.unique(g)
    near = lo + span * np.logspace(-12, -3, 200)
    return np.unique(np.concatenate([near, lo + span * np.linspace(1e-3, 1.0, 4000)]))


def solve_bayes(a: float, b: float, c: float, dist: TypeDistribution) -> BayesEquilibrium:
    """Equilibrium of the game with nonnegative efforts."""
    _check_tech(b, c)
    dist.check_support(c)
    aff = affine_bne(a, b, c, dist)
    if a <= 0 or aff.fully_active:
        return aff
    alpha = dist.alpha
    m = dist.atom_at_alpha
    if m > 0 and a * m * (c - alpha) >= b * b:
        return BoundaryAtom(a, b, c, dist, b * b / (a * m * (c - alpha)), (c - alpha) / b, m)

    grid = _t_grid(dist, c)
    vals = _H_vec(a, b, c, dist, grid)
    brackets = [(lo, hi) for lo, hi in sign_change_brackets(vals, grid)]
    if not brackets:
        raise SolverError("no sign change of H on (alpha, c)")
    lo, hi = brackets[0]
    if lo == hi:
        t = lo
    else:
        t = bisect(lambda s: H(a, b, c, dist, s), lo, hi, xtol=1e-16)
    lp = lower_partial(dist, t, c)
    lam = math.sqrt((c - t) / (a * lp.B))
    res = (2 * a * lp.A * lam**2 - 2 * b * lam + 1, t - (c - a * lp.B * lam**2))
    if max(abs(r) for r in res) > 1e-8:
        raise SolverError(f"cutoff fixed point residuals too large: {res}")
    return CutoffAffine(a, b, c, dist, lam, t, lam * lp.A, lam * lam * lp.B, 1.0 - lp.F,
                        res, len(brackets) > 1)


# ------------------------------------------------------------ dropout map

def _require_atomless(dist: TypeDistribution) -> None:
    if not dist.atomless:
        raise ContestError("dropout thresholds are defined for atomless priors "
                           "(uniform or beta mixture)")


def a_F(b: float, c: float, dist: TypeDistribution, t: float) -> float:
    """Suppression level at which t is the equilibrium cutoff."""
    lp = lower_partial(dist, t, c)
    return 4 * b * b * (c - t) * lp.B / lp.D**2


def lambda_F(b: float, c: float, dist: TypeDistribution, t: float) -> float:
    lp = lower_partial(dist, t, c)
    return lp.D / (2 * b * lp.B)


def dropout_threshold(b: float, c: float, dist: TypeDistribution) -> float:
    """a_D: the smallest a at which the highest-cost types stop participating."""
    _check_tech(b, c)
    dist.check_support(c)
    _require_atomless(dist)
    return a_F(b, c, dist, dist.beta)


def uniform_dropout_threshold(b: float, c: float, alpha: float, beta: float) -> float:
    """Closed form of a_D for a uniform prior."""
    h, q = beta - alpha, c - beta
    return 4 * b * b * q / (3 * (q + h / 3) ** 2)


@dataclass(frozen=True)
class CutoffPoint:
    t: float
    lam: float
    dropout_rate: float


def cutoff_map(b: float, c: float, dist: TypeDistribution, a: float) -> CutoffPoint:
    """Invert the strictly decreasing a_F on (alpha, beta)."""
    a_d = dropout_threshold(b, c, dist)
    if a <= a_d:
        raise ContestError(f"a={a} <= a_D={a_d}: the fully active affine branch applies")
    lo, hi = dist.alpha, dist.beta
    g = lambda t: a_F(b, c, dist, t) - a  # noqa: E731
    # a_F(alpha+) is infinite; step in geometrically until the sign is right
    eps = (hi - lo) * 1e-3
    while g(lo + eps) < 0:
        eps *= 1e-3
        if eps < 1e-300:
            raise SolverError("could not bracket the cutoff near alpha")
    t = bisect(g, lo + eps, hi, xtol=1e-16, ftol=1e-12 * a)
    lp = lower_partial(dist, t, c)
    return CutoffPoint(t, lp.D / (2 * b * lp.B), 1.0 - lp.F)


# ------------------------------------------------------ truncation checks

def truncation_check_simple(bne: AffineBNE) -> bool:
    """Four inequalities certifying the affine rule in the literal contest.

    x_high <= 1/alpha, c^2 <= 2b, a <= b alpha, c alpha^2 - 2b alpha + a >= 0.
    """
    a, b, c, al = bne.a, bne.b, bne.c, bne.alpha
    return (bne.fully_active and bne.x_high <= 1 / al and c * c <= 2 * b
            and a <= b * al and c * al * al - 2 * b * al + a >= 0)


def edge_quadratic_min(b: float, c: float, lo: float, hi: float) -> float:
    """min over y in [lo, hi] of 1/2 - c y + b y^2."""
    y = min(max(c / (2 * b), lo), hi)
    return 0.5 - c * y + b * y * y


def truncation_check_support(bne: AffineBNE) -> bool:
    """Variant of the simple check using the realized effort support."""
    a, b, c, al = bne.a, bne.b, bne.c, bne.alpha
    if not bne.fully_active:
        return False
    return (bne.x_high <= 1 / al and edge_quadratic_min(b, c, bne.x_low, bne.x_high) >= 0
            and a <= b * al and c * al * al - 2 * b * al + a >= 0)


def neutral_support_interior(b: float, alpha: float, beta: float) -> bool:
    """At a = 0, on-path raw probabilities are interior iff beta^2 - alpha^2 < 2b."""
    return beta * beta - alpha * alpha < 2 * b
