"""Complete-information equilibria of the cubic contest with a common cost.

Pure equilibria solve a x^2 - 2b x + (c - theta) = 0 on the second-order
side a x < b; when the discriminant zeta is negative only the first two
moments of a mixed equilibrium are pinned down (mean kappa, variance -zeta)
and a canonical two-point representation is attached.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .csf import ContestTechnology, raw_probability, truncated_probability
from .errors import ContestError, InapplicableCriterion
from .roots import golden_max


@dataclass(frozen=True)
class CompleteInfoProblem:
    tech: ContestTechnology
    theta: float

    def __post_init__(self):
        if not (0 < self.theta < self.tech.c):
            raise ContestError(f"theta must lie in (0, c): got theta={self.theta}, c={self.tech.c}")

    @classmethod
    def make(cls, a: float, b: float, c: float, theta: float) -> "CompleteInfoProblem":
        return cls(ContestTechnology(a, b, c), theta)

    @property
    def a(self):
        return self.tech.a

    @property
    def b(self):
        return self.tech.b

    @property
    def c(self):
        return self.tech.c

    @property
    def margin(self) -> float:
        """c - theta, the net marginal return at zero effort."""
        return self.tech.c - self.theta

    @property
    def kappa(self) -> float:
        return self.tech.kappa()

    @property
    def zeta(self) -> float:
        if self.a == 0:
            raise ContestError("zeta is undefined at a = 0")
        return (self.b**2 - self.a * self.margin) / self.a**2

    @property
    def s(self) -> float:
        z = self.zeta
        if z >= 0:
            raise ContestError("s = sqrt(-zeta) is defined only in the mixed region")
        return math.sqrt(-z)

    @property
    def mixed_region(self) -> bool:
        """zeta < 0, i.e. a > b^2 / (c - theta)."""
        return self.a * self.margin > self.b**2


class Branch(enum.Enum):
    SYMMETRIC = "symmetric"
    ENDPOINT = "endpoint"


@dataclass(frozen=True)
class TwoPointRepresentation:
    low: float
    high: float
    p_low: float
    p_high: float
    branch: Branch

    @property
    def points(self) -> tuple[float, float]:
        return self.low, self.high

    @property
    def probabilities(self) -> tuple[float, float]:
        return self.p_low, self.p_high

    @property
    def mean(self) -> float:
        return self.p_low * self.low + self.p_high * self.high

    @property
    def variance(self) -> float:
        m = self.mean
        return self.p_low * (self.low - m) ** 2 + self.p_high * (self.high - m) ** 2


@dataclass(frozen=True)
class PureSymmetric:
    problem: CompleteInfoProblem
    x_star: float
    payoff: float
    kind = "pure"


@dataclass(frozen=True)
class MixedMoments:
    problem: CompleteInfoProblem
    mean: float
    variance: float
    representation: TwoPointRepresentation
    payoff: float
    kind = "mixed"


CompleteInfoEquilibrium = PureSymmetric | MixedMoments


def pure_effort(a: float, b: float, margin: float) -> float:
    """Root of a x^2 - 2b x + margin = 0 with a x < b, in cancellation-free form.

    kappa - sgn(a) sqrt(zeta) rationalizes to margin / (b + sqrt(b^2 - a margin)),
    which also covers a = 0.
    """
    disc = b * b - a * margin
    if disc < 0:
        raise ContestError("no pure equilibrium: zeta < 0")
    return margin / (b + math.sqrt(disc))


def solve_complete(problem: CompleteInfoProblem) -> CompleteInfoEquilibrium:
    if problem.a == 0 or not problem.mixed_region:
        x = pure_effort(problem.a, problem.b, problem.margin)
        return PureSymmetric(problem, x, 0.5 - problem.theta * x)
    rep = canonical_two_point(problem)
    kappa = problem.kappa
    return MixedMoments(problem, kappa, -problem.zeta, rep, 0.5 - problem.theta * kappa)


def branch_switch(b: float, margin: float) -> float:
    """a = 2b^2/(c - theta), where the two canonical branches coincide."""
    return 2 * b * b / margin


def canonical_two_point(problem: CompleteInfoProblem) -> TwoPointRepresentation:
    if problem.a <= 0:
        raise ContestError("mixed equilibria require a > 0")
    if not problem.mixed_region:
        raise ContestError("mixed equilibria require zeta < 0")
    a, b, m = problem.a, problem.b, problem.margin
    kappa = b / a
    if a <= branch_switch(b, m):
        s = problem.s
        return TwoPointRepresentation(max(kappa - s, 0.0), kappa + s, 0.5, 0.5, Branch.SYMMETRIC)
    z = m / b
    p = b * b / (a * m)
    return TwoPointRepresentation(0.0, z, 1.0 - p, p, Branch.ENDPOINT)


def participation_check(problem: CompleteInfoProblem, eq: CompleteInfoEquilibrium) -> bool:
    return eq.payoff >= 0


def admissibility_bound(b: float, c: float, theta: float) -> float:
    """Largest a for which the endpoint representation stays on the domain.

    Raises InapplicableCriterion when b < 2 theta (c - theta) makes the
    radicand negative.
    """
    rad = b * (b - 2 * c * theta + 2 * theta * theta)
    if rad < 0:
        raise InapplicableCriterion("endpoint admissibility bound needs b >= 2 theta (c - theta)")
    m = c - theta
    return (b + c * c - 3 * c * theta + 2 * theta * theta + math.sqrt(rad)) * b * b / m**3


def branch_admissibility(problem: CompleteInfoProblem, rep: TwoPointRepresentation) -> bool:
    """Sufficient condition for the representation to be an equilibrium of
    the truncated game. Raises InapplicableCriterion on the endpoint branch
    when the bound's premise fails."""
    _check_rep(problem, rep)
    tech = problem.tech
    if rep.branch is Branch.SYMMETRIC:
        kappa, s = problem.kappa, problem.s
        x_bar = max(0.0, kappa - problem.theta / (2 * problem.a * s))
        return (raw_probability(tech, 0.0, kappa - s) >= 0
                and raw_probability(tech, x_bar, kappa + s) >= 0)
    return problem.a <= admissibility_bound(problem.b, problem.c, problem.theta)


def simple_sufficient_check(problem: CompleteInfoProblem) -> bool:
    b, c, th = problem.b, problem.c, problem.theta
    if not (th < c <= 2 * th) or b < c * c / 2:
        return False
    if not problem.mixed_region:
        return False
    try:
        return problem.a <= admissibility_bound(b, c, th)
    except InapplicableCriterion:
        return False


def local_support_check(problem: CompleteInfoProblem, rep: TwoPointRepresentation) -> bool:
    """Support strictly inside the admissible domain (branch-specific)."""
    if not problem.mixed_region:
        raise ContestError("local support check applies in the mixed region")
    if rep.branch is Branch.SYMMETRIC:
        return problem.s < 1 / (4 * problem.theta)
    return problem.b > 2 * problem.theta * problem.margin


def _check_rep(problem: CompleteInfoProblem, rep: TwoPointRepresentation, tol: float = 1e-10):
    if not problem.mixed_region:
        raise ContestError("representation checks apply in the mixed region")
    if abs(rep.mean - problem.kappa) > tol * max(1.0, problem.kappa) or \
            abs(rep.variance + problem.zeta) > tol * max(1.0, -problem.zeta):
        raise ContestError("representation moments do not match (kappa, -zeta)")


@dataclass(frozen=True)
class BestResponse:
    x: float
    curvature: float


def best_response_interior(problem: CompleteInfoProblem, y: float) -> BestResponse | None:
    """Interior stationary best response to a pure opponent effort y.

    Present only when a y < b (the payoff is then strictly concave in x).
    ``curvature`` is a (b^2 - a(c - theta)) / (a y - b)^3, the second
    derivative of the response map; its sign is sgn(a^3 zeta / (a y - b)^3).
    """
    a, b, m = problem.a, problem.b, problem.margin
    if a * y >= b:
        return None
    x = (a * y * y - m) / (2 * (a * y - b))
    curv = a * (b * b - a * m) / (a * y - b) ** 3
    return BestResponse(x, curv)


@dataclass(frozen=True)
class EffortCurve:
    a: np.ndarray
    total_effort: np.ndarray
    regime: tuple
    argmax_a: float
    max_total: float


def effort_curve(b: float, c: float, theta: float, a_grid: Sequence[float]) -> EffortCurve:
    """Total expected effort 2 E[x] along a grid of a values."""
    a_arr = np.asarray(a_grid, dtype=float)
    totals = np.empty_like(a_arr)
    regimes = []
    for i, a in enumerate(a_arr):
        eq = solve_complete(CompleteInfoProblem.make(float(a), b, c, theta))
        if isinstance(eq, PureSymmetric):
            totals[i] = 2 * eq.x_star
            regimes.append("pure")
        else:
            totals[i] = 2 * b / a
            regimes.append("mixed")
    i = int(np.argmax(totals))  # first index among ties: smallest a
    return EffortCurve(a_arr, totals, tuple(regimes), float(a_arr[i]), float(totals[i]))


def expected_truncated_win(problem: CompleteInfoProblem, x, rep: TwoPointRepresentation):
    """E[Pbar(x, Y)] for Y distributed as the representation (exact sum)."""
    tech = problem.tech
    return (rep.p_low * np.asarray(truncated_probability(tech, x, rep.low))
            + rep.p_high * np.asarray(truncated_probability(tech, x, rep.high)))


def failure_deviation_scan(problem: CompleteInfoProblem, rep: TwoPointRepresentation,
                           deviation: float) -> float:
    """Truncated payoff of ``deviation`` against rep minus 1/2 - theta kappa."""
    payoff = float(expected_truncated_win(problem, deviation, rep)) - problem.theta * deviation
    return payoff - (0.5 - problem.theta * problem.kappa)


@dataclass(frozen=True)
class FailureScan:
    max_gain: float
    deviation: float
    lam: float


def failure_scan(problem: CompleteInfoProblem, rep: TwoPointRepresentation, *,
                 n: int = 10_000, upper: float = 1e3) -> FailureScan:
    """Scan deviations x = lam / a over lam in (b, upper b] and report the best."""
    a, b = problem.a, problem.b
    lam = np.linspace(b, upper * b, n + 1)[1:]
    xs = lam / a
    gains = (expected_truncated_win(problem, xs, rep) - problem.theta * xs
             - (0.5 - problem.theta * problem.kappa))
    i = int(np.argmax(gains))
    lo = lam[max(i - 1, 0)]
    hi = lam[min(i + 1, n - 1)]
    best_lam, best_gain = golden_max(
        lambda l: failure_deviation_scan(problem, rep, l / a), lo, hi)
    if best_gain < gains[i]:
        best_lam, best_gain = lam[i], gains[i]
    return FailureScan(float(best_gain), float(best_lam / a), float(best_lam))
