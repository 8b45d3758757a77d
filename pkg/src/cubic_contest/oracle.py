"""Brute-force verification against the literal (truncated) contest.

Interim payoffs are computed directly from the truncated success function:
exact finite sums against discrete opponents, Gauss-Legendre quadrature in
type space against continuous priors composed with an effort rule. The
quadrature splits the type interval at the rule's kink and at every type
where the raw probability crosses 0 or 1, so each piece is smooth.
"""
from __future__ import annotations

import math
from functools import lru_cache
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from . import bayes
from .complete_info import MixedMoments, PureSymmetric
from .csf import ContestTechnology, raw_probability
from .errors import ContestError, SolverError
from .priors import Degenerate, Discrete, TypeDistribution
from .roots import golden_max
from .statics import dE1_domega, expected_effort_of_a

ZERO_GAIN = 1e-8
QUAD_TOL = 1e-11
MAX_DOUBLINGS = 4
CHUNK = 256
# The deviation grid only locates candidate maxima; every reported payoff is
# re-evaluated with the converged rule, so the scan uses a lighter rule.
SCAN_NODES = 64


@dataclass(frozen=True)
class PureAction:
    x: float

    def __post_init__(self):
        if self.x < 0:
            raise ContestError("efforts must be nonnegative")


@dataclass(frozen=True)
class FiniteMixture:
    points: tuple
    probs: tuple

    def __init__(self, points: Sequence[float], probs: Sequence[float]):
        pts = tuple(float(p) for p in points)
        pr = tuple(float(p) for p in probs)
        if len(pts) != len(pr) or not pts:
            raise ContestError("mixture needs matching points and probabilities")
        if any(p < 0 for p in pts) or any(p < 0 for p in pr):
            raise ContestError("mixture points and probabilities must be nonnegative")
        if abs(math.fsum(pr) - 1) > 1e-12:
            raise ContestError("mixture probabilities must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "probs", pr)


@dataclass(frozen=True)
class TypeRule:
    """Effort rule x(theta) = max(0, intercept + slope theta) over a prior.

    ``nodes`` and ``panels`` fix the base quadrature: each smooth piece of
    each of ``panels`` equal sub-intervals of the support gets ``nodes``
    Gauss-Legendre points.
    """

    dist: TypeDistribution = field(repr=False)
    intercept: float
    slope: float
    nodes: int = 256
    panels: int = 8

    def __call__(self, theta):
        return np.maximum(self.intercept + self.slope * np.asarray(theta, dtype=float), 0.0)

    @property
    def kink(self) -> float:
        """Type at which the rule reaches zero, clipped to the support."""
        lo, hi = self.dist.alpha, self.dist.beta
        if self.slope >= 0:
            return lo if self.intercept + self.slope * lo <= 0 else hi
        return min(max(-self.intercept / self.slope, lo), hi)


StrategyProfile = PureAction | FiniteMixture | TypeRule


# ----------------------------------------------------------- expectations

def _discrete_support(opponent) -> tuple[np.ndarray, np.ndarray] | None:
    if isinstance(opponent, PureAction):
        return np.array([opponent.x]), np.array([1.0])
    if isinstance(opponent, FiniteMixture):
        return np.array(opponent.points), np.array(opponent.probs)
    if isinstance(opponent.dist, Discrete):
        return opponent(np.array(opponent.dist.values)), np.array(opponent.dist.weights)
    if isinstance(opponent.dist, Degenerate):
        return opponent(np.array([opponent.dist.value])), np.array([1.0])
    return None


def _prob_coefficients(tech: ContestTechnology, x: np.ndarray):
    """P(x, y) = p0 + p1 y + p2 y^2 as a polynomial in the opponent's effort."""
    return 0.5 + x * (tech.c - tech.b * x), tech.a * x * x - tech.c, tech.b - tech.a * x


def _quadratic_roots(p0, p1, p2, level):
    """Real roots of p2 y^2 + p1 y + (p0 - level) = 0 (NaN when absent)."""
    c0 = p0 - level
    disc = p1 * p1 - 4 * p2 * c0
    with np.errstate(invalid="ignore", divide="ignore"):
        sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
        qq = -0.5 * (p1 + np.copysign(sq, p1))
        r1 = np.where(p2 != 0, qq / p2, np.where(p1 != 0, -c0 / p1, np.nan))
        r2 = np.where(p2 != 0, c0 / qq, np.nan)
    return r1, r2


@lru_cache(maxsize=16)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


def _rule_quadrature(tech: ContestTechnology, xs: np.ndarray, rule: TypeRule, truncated: bool,
                     n: int) -> np.ndarray:
    dist = rule.dist
    lo, hi = dist.alpha, dist.beta
    nodes, weights = gauss_legendre(n)
    fixed = np.concatenate([np.linspace(lo, hi, rule.panels + 1), [rule.kink]])
    out = np.empty(len(xs))
    for start in range(0, len(xs), CHUNK):
        x = xs[start:start + CHUNK]
        p0, p1, p2 = _prob_coefficients(tech, x)
        cols = [np.broadcast_to(fixed, (len(x), len(fixed)))]
        if truncated and rule.slope != 0:
            for level in (0.0, 1.0):
                for r in _quadratic_roots(p0, p1, p2, level):
                    th = (r - rule.intercept) / rule.slope
                    cols.append(np.where(np.isfinite(th), np.clip(th, lo, hi), lo)[:, None])
        bp = np.sort(np.concatenate(cols, axis=1), axis=1)
        left, right = bp[:, :-1], bp[:, 1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        th = mid[..., None] + half[..., None] * nodes
        y = rule(th)
        p = p0[:, None, None] + y * (p1[:, None, None] + y * p2[:, None, None])
        if truncated:
            p = np.clip(p, 0.0, 1.0)
        integrand = dist.pdf(th) * p
        out[start:start + CHUNK] = np.einsum("ijk,k,ij->i", integrand, weights, half)
    return out


def win_probability(tech: ContestTechnology, xs, opponent: StrategyProfile, *,
                    truncated: bool = True, nodes: int | None = None) -> np.ndarray:
    """E[P(x, Y)] (clamped if ``truncated``) for each deviation x, at a fixed rule."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    sup = _discrete_support(opponent)
    if sup is not None:
        ys, ws = sup
        p = raw_probability(tech, xs[:, None], ys[None, :])
        if truncated:
            p = np.clip(p, 0.0, 1.0)
        return p @ ws
    if not hasattr(opponent.dist, "pdf"):
        raise ContestError(f"no quadrature rule for prior kind {opponent.dist.kind!r}")
    return _rule_quadrature(tech, xs, opponent, truncated, nodes or opponent.nodes)


@dataclass(frozen=True)
class Quadrature:
    scheme: str
    nodes: int
    est_error: float


def win_probability_converged(tech: ContestTechnology, xs, opponent: StrategyProfile, *,
                              truncated: bool = True) -> tuple[np.ndarray, Quadrature]:
    """Like win_probability, doubling the node count until the change is below 1e-11."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if _discrete_support(opponent) is not None:
        return win_probability(tech, xs, opponent, truncated=truncated), Quadrature("exact-sum", 0, 0.0)
    n = opponent.nodes
    prev = win_probability(tech, xs, opponent, truncated=truncated, nodes=n)
    for _ in range(MAX_DOUBLINGS):
        n *= 2
        cur = win_probability(tech, xs, opponent, truncated=truncated, nodes=n)
        err = float(np.max(np.abs(cur - prev)))
        if err < QUAD_TOL:
            return cur, Quadrature("gauss-legendre", n, err)
        prev = cur
    raise SolverError(f"quadrature did not converge after {MAX_DOUBLINGS} doublings "
                      f"(last change {err:.3g})")


def interim_payoff(tech: ContestTechnology, theta: float, action: float,
                   opponent: StrategyProfile, *, truncated: bool = True) -> float:
    """Expected payoff of a type-theta player exerting ``action``."""
    if action < 0:
        raise ContestError("action must be nonnegative")
    w, _ = win_probability_converged(tech, [action], opponent, truncated=truncated)
    return float(w[0]) - theta * action


# ---------------------------------------------------------------- scans

@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    n: int

    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)


@dataclass(frozen=True)
class ScanResult:
    argmax: float
    value: float
    grid: Grid


def _refine(tech, theta, opponent, truncated, xs, vals, top: int = 3):
    """Golden-section refinement around the ``top`` best grid cells."""
    best_x, best_v = float(xs[np.argmax(vals)]), float(np.max(vals))
    f = lambda x: interim_payoff(tech, theta, x, opponent, truncated=truncated)  # noqa: E731
    best_v = f(best_x)
    for i in np.argsort(vals)[::-1][:top]:
        lo = xs[max(i - 1, 0)]
        hi = xs[min(i + 1, len(xs) - 1)]
        x, v = golden_max(f, lo, hi, tol=1e-10)
        if v > best_v:
            best_x, best_v = float(x), float(v)
    return best_x, best_v


def best_response_scan(tech: ContestTechnology, theta: float, opponent: StrategyProfile, *,
                       truncated: bool = True, grid: Grid | None = None,
                       refine: bool = True) -> ScanResult:
    """Grid argmax of the interim payoff over [0, x_max] (default x_max = 1/theta)."""
    grid = grid or Grid(0.0, 1.0 / theta, 10_000)
    xs = grid.points()
    vals = win_probability(tech, xs, opponent, truncated=truncated, nodes=SCAN_NODES) - theta * xs
    if not refine:
        i = int(np.argmax(vals))
        return ScanResult(float(xs[i]), float(vals[i]), grid)
    x, v = _refine(tech, theta, opponent, truncated, xs, vals)
    return ScanResult(x, v, grid)


# ---------------------------------------------------------- verification

@dataclass(frozen=True)
class VerificationReport:
    max_gain: float
    raw_max_gain: float
    argmax_deviation: float
    argmax_type: float | None
    grid: dict
    quadrature: dict
    truncation_active_on_path: bool
    probability_range_on_path: tuple
    types_checked: int

    @property
    def passed(self) -> bool:
        return self.raw_max_gain < 1e-6

    def to_json(self) -> dict:
        return asdict(self)


def _box_max_probability(tech: ContestTechnology, lo: float, hi: float) -> float:
    """max of P(x, y) over [lo, hi]^2 by a dense grid and a bounded polish."""
    g = np.linspace(lo, hi, 401)
    P = raw_probability(tech, g[:, None], g[None, :])
    i, j = np.unravel_index(int(np.argmax(P)), P.shape)
    best = float(P[i, j])
    if hi > lo:
        res = minimize(lambda v: -raw_probability(tech, v[0], v[1]), x0=[g[i], g[j]],
                       bounds=[(lo, hi), (lo, hi)], method="L-BFGS-B",
                       options={"ftol": 1e-15, "gtol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def _support_range(tech, opponent) -> tuple[float, float]:
    sup = _discrete_support(opponent)
    if sup is not None:
        ys = sup[0][sup[1] > 0]
        P = raw_probability(tech, ys[:, None], ys[None, :])
        return float(P.min()), float(P.max())
    rule = opponent
    lo = float(rule(rule.dist.beta))
    hi = float(rule(rule.dist.alpha))
    top = _box_max_probability(tech, lo, hi)
    return 1.0 - top, top


def opponent_profile(eq) -> tuple[ContestTechnology, StrategyProfile]:
    """The strategy profile an equilibrium induces for the opponent."""
    if isinstance(eq, PureSymmetric):
        return eq.problem.tech, PureAction(eq.x_star)
    if isinstance(eq, MixedMoments):
        rep = eq.representation
        return eq.problem.tech, FiniteMixture(rep.points, rep.probabilities)
    tech = ContestTechnology(eq.a, eq.b, eq.c)
    if isinstance(eq, bayes.BoundaryAtom):
        q = eq.atom_mass * eq.p
        return tech, FiniteMixture([0.0, eq.x_high], [1 - q, q])
    if isinstance(eq, (bayes.AffineBNE, bayes.CutoffAffine)):
        return tech, TypeRule(eq.dist, eq.d, eq.k)
    raise ContestError(f"cannot verify object of type {type(eq).__name__}")


def _candidate_payoffs(eq, tech, opponent, types, truncated):
    """Equilibrium interim payoff per type (mixed strategies averaged)."""
    out = []
    quad = Quadrature("exact-sum", 0, 0.0)
    for th in types:
        if isinstance(eq, MixedMoments):
            rep = eq.representation
            acts, probs = np.array(rep.points), np.array(rep.probabilities)
        elif isinstance(eq, bayes.BoundaryAtom):
            if th == eq.dist.alpha:
                acts, probs = np.array([0.0, eq.x_high]), np.array([1 - eq.p, eq.p])
            else:
                acts, probs = np.array([0.0]), np.array([1.0])
        elif isinstance(eq, PureSymmetric):
            acts, probs = np.array([eq.x_star]), np.array([1.0])
        else:
            x = float(eq.effort(th))
            if x < -1e-12:
                raise ContestError(f"rule prescribes negative effort {x} at type {th}")
            acts, probs = np.array([max(x, 0.0)]), np.array([1.0])
        w, quad = win_probability_converged(tech, acts, opponent, truncated=truncated)
        out.append(float(np.dot(probs, w - th * acts)))
    return np.array(out), quad


def verify_equilibrium(eq, *, truncated: bool = True, grid_n: int = 10_000,
                       x_max: float | None = None,
                       type_sample: Sequence[float] | None = None) -> VerificationReport:
    """Largest gain from a unilateral deviation, over sampled types and a deviation grid."""
    tech, opponent = opponent_profile(eq)
    if isinstance(eq, (PureSymmetric, MixedMoments)):
        types = [eq.problem.theta]
        default_max = 1.0 / eq.problem.theta
    else:
        dist = eq.dist
        if type_sample is not None:
            types = [float(t) for t in type_sample]
        elif isinstance(dist, (Discrete, Degenerate)):
            types = sorted(set(getattr(dist, "values", (dist.alpha,))))
        else:
            types = list(np.linspace(dist.alpha, dist.beta, 11))
        default_max = 1.0 / dist.alpha
    grid = Grid(0.0, x_max if x_max is not None else default_max, grid_n)
    xs = grid.points()
    win = win_probability(tech, xs, opponent, truncated=truncated, nodes=SCAN_NODES)
    cand, quad = _candidate_payoffs(eq, tech, opponent, types, truncated)

    best_gain, best_x, best_t = -math.inf, 0.0, None
    for th, u in zip(types, cand):
        vals = win - th * xs
        x, v = _refine(tech, th, opponent, truncated, xs, vals)
        if v - u > best_gain:
            best_gain, best_x, best_t = v - u, x, th
    lo, hi = _support_range(tech, opponent)
    return VerificationReport(
        max_gain=float(best_gain) if best_gain >= ZERO_GAIN else 0.0,
        raw_max_gain=float(best_gain),
        argmax_deviation=float(best_x),
        argmax_type=None if isinstance(eq, (PureSymmetric, MixedMoments)) else float(best_t),
        grid={"lo": grid.lo, "hi": grid.hi, "n": grid.n, "step": (grid.hi - grid.lo) / (grid.n - 1)},
        quadrature=asdict(quad),
        truncation_active_on_path=bool(lo <= 0 or hi >= 1),
        probability_range_on_path=(float(lo), float(hi)),
        types_checked=len(types),
    )


# ----------------------------------------------------- finite differences

@dataclass(frozen=True)
class FDCheck:
    analytic: float
    numeric: float
    abs_err: float


def finite_difference_check(tag: str, point: Sequence[float], step: float) -> FDCheck:
    """Central-difference check of a closed-form derivative.

    tags: "cross_partial" with point (a, b, c, x, y);
    "dE1_domega" and "dE1_dsigma_sq" with point (a, b, Delta, sigma_sq).
    """
    if step <= 0:
        raise ContestError("step must be positive")
    if tag == "cross_partial":
        a, b, c, x, y = point
        tech = ContestTechnology(a, b, c)
        h = step
        num = (raw_probability(tech, x + h, y + h) - raw_probability(tech, x + h, y - h)
               - raw_probability(tech, x - h, y + h) + raw_probability(tech, x - h, y - h)) / (4 * h * h)
        ana = 2 * a * (x - y)
    elif tag == "dE1_domega":
        a, b, delta, s2 = point
        if a == 0:
            raise ContestError("omega is undefined at a = 0")
        e = lambda om: expected_effort_of_a(a, b, delta, om * a * a)  # noqa: E731
        om = s2 / (a * a)
        num = (e(om + step) - e(om - step)) / (2 * step)
        ana = dE1_domega(a, b, delta, s2)
    elif tag == "dE1_dsigma_sq":
        a, b, delta, s2 = point
        e = lambda v: expected_effort_of_a(a, b, delta, v)  # noqa: E731
        num = (e(s2 + step) - e(s2 - step)) / (2 * step)
        ana = 0.0 if a == 0 else dE1_domega(a, b, delta, s2) / (a * a)
    else:
        raise ContestError(f"unknown finite-difference tag {tag!r}")
    return FDCheck(float(ana), float(num), float(abs(ana - num)))
