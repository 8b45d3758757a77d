"""Comparative statics of expected effort: the E1(a) curve, its peak a†,
variance thresholds for the peak, disclosure, and the constrained path
with dropout."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import bayes
from .complete_info import CompleteInfoProblem, MixedMoments, solve_complete
from .errors import ContestError, SolverError
from .priors import (Degenerate, TypeDistribution, lower_partial,
                     posterior_mean_distribution)
from .roots import bisect

PHI = (1 + math.sqrt(5)) / 2
PSI = (1 - math.sqrt(5)) / 2
G_CAP = 1e18


def expected_effort_of_a(a: float, b: float, delta: float, sigma_sq: float) -> float:
    """Fully active expected effort E1 as a function of a (any sign)."""
    if sigma_sq < 0:
        raise ContestError("sigma_sq must be nonnegative")
    return bayes.affine_parts(a, b, delta, sigma_sq).E1


def expected_effort_kappa_form(a: float, b: float, delta: float, sigma_sq: float) -> float:
    """kappa - sgn(a)/sqrt(2) sqrt(zeta + sqrt(zeta^2 + omega)), a != 0."""
    if a == 0:
        raise ContestError("the kappa form is undefined at a = 0")
    kappa = b / a
    zeta = kappa * kappa - delta / a
    omega = sigma_sq / (a * a)
    return kappa - math.copysign(1.0, a) / math.sqrt(2) * math.sqrt(zeta + math.sqrt(zeta * zeta + omega))


def dE1_domega(a: float, b: float, delta: float, sigma_sq: float) -> float:
    """Closed-form derivative of E1 with respect to omega = sigma^2 / a^2."""
    if a == 0:
        raise ContestError("omega is undefined at a = 0")
    zeta = (b * b - a * delta) / (a * a)
    omega = sigma_sq / (a * a)
    root = math.sqrt(zeta * zeta + omega)
    return -math.copysign(1.0, a) / (4 * math.sqrt(2) * root * math.sqrt(zeta + root))


def positivity_boundary(b: float, delta: float, sigma_sq: float) -> float:
    """a-bar = 4 b^2 Delta / sigma^2, where E1 reaches zero."""
    if sigma_sq <= 0:
        raise ContestError("sigma_sq must be positive")
    return 4 * b * b * delta / sigma_sq


def sharper_peak_bound(b: float, delta: float, sigma_sq: float) -> float:
    return 2 * b * b * delta / (delta * delta + sigma_sq)


# ------------------------------------------------------------------ peak

def g(y: float) -> float:
    """y^3 (2 - y) / (y^2 - y - 1)^2, factored near the pole at y = phi."""
    den = (y - PHI) * (y - PSI) if abs(y - PHI) < 1e-3 else y * y - y - 1
    if den == 0:
        return G_CAP
    return min(y**3 * (2 - y) / (den * den), G_CAP)


def _u(y: float, rho: float) -> float:
    return math.sqrt(y * y + rho * (y * y - 1))


def xi_minus(y: float, rho: float) -> float:
    """Normalized peak a Delta / b^2 at y: 2y(y - u)/rho, written as
    2y(1 - y^2)/(y + u) to avoid cancellation."""
    return 2 * y * (1 - y * y) / (y + _u(y, rho))


def xi_closed(y: float) -> float:
    """Equivalent closed form 2(1 - y)(1 + y - y^2)/(2 - y) on the curve g(y) = rho."""
    return 2 * (1 - y) * (1 + y - y * y) / (2 - y)


def solve_g(rho: float) -> float:
    if rho <= 0:
        raise ContestError("rho must be positive")
    if rho == 1:
        return 1.0
    return bisect(lambda y: g(y) - rho, 1e-12, PHI - 1e-12, xtol=1e-16)


@dataclass(frozen=True)
class PeakResult:
    a_dagger: float
    y_dagger: float
    a_dagger_closed: float
    rho: float
    E1: float
    bound: float
    a_bar: float


def peak_a(b: float, delta: float, sigma_sq: float) -> PeakResult:
    """The a maximizing fully active expected effort."""
    if sigma_sq <= 0 or b <= 0 or delta <= 0:
        raise ContestError("peak_a needs b, Delta, sigma_sq > 0")
    rho = sigma_sq / (delta * delta)
    y = solve_g(rho)
    scale = b * b / delta
    a1 = scale * xi_minus(y, rho)
    a2 = scale * xi_closed(y)
    if abs(a1 - a2) > 1e-10 * max(1.0, abs(a1)):
        raise SolverError(f"peak paths disagree: {a1!r} vs {a2!r}")
    return PeakResult(a1, y, a2, rho, expected_effort_of_a(a1, b, delta, sigma_sq),
                      sharper_peak_bound(b, delta, sigma_sq),
                      positivity_boundary(b, delta, sigma_sq))


def peak_a_sigma_derivative(b: float, delta: float, sigma_sq: float) -> float:
    """Central difference of a† in sigma^2 (mean held fixed)."""
    h = max(1e-6, 1e-4 * sigma_sq)
    h = min(h, 0.5 * sigma_sq)
    return (peak_a(b, delta, sigma_sq + h).a_dagger - peak_a(b, delta, sigma_sq - h).a_dagger) / (2 * h)


def q_cubic(y: float) -> float:
    return 2 * y**3 - 8 * y * y + 8 * y - 1


@dataclass(frozen=True)
class PeakVarianceThresholds:
    y1: float
    y2: float
    rho1: float
    rho2: float
    sigma1_sq: float
    sigma2_sq: float


def peak_variance_thresholds(delta: float) -> PeakVarianceThresholds:
    """Variances at which a†(sigma^2) switches between rising and falling."""
    if delta <= 0:
        raise ContestError("Delta must be positive")
    # q(0) = -1, q(2/3) > 0, q(1) = 1, q(phi) < 0
    y1 = bisect(q_cubic, 0.0, 2.0 / 3.0, xtol=1e-16)
    y2 = bisect(q_cubic, 1.0, PHI, xtol=1e-16)
    r1, r2 = g(y1), g(y2)
    return PeakVarianceThresholds(y1, y2, r1, r2, r1 * delta**2, r2 * delta**2)


# ------------------------------------------------------------ disclosure

class Policy(enum.Enum):
    NO_DISCLOSURE = "no_disclosure"
    FULL_DISCLOSURE = "full_disclosure"
    INDIFFERENT = "indifferent"


@dataclass(frozen=True)
class DisclosureAdvice:
    policy: Policy
    direction: int  # sign of dE1 / dVar(posterior mean)


def optimal_disclosure(a: float) -> DisclosureAdvice:
    if a > 0:
        return DisclosureAdvice(Policy.NO_DISCLOSURE, -1)
    if a < 0:
        return DisclosureAdvice(Policy.FULL_DISCLOSURE, 1)
    return DisclosureAdvice(Policy.INDIFFERENT, 0)


def expected_effort_under_signal(a: float, b: float, c: float, dist: TypeDistribution,
                                 signal) -> float:
    """Affine-benchmark E1 at the posterior-mean distribution.

    A degenerate posterior is read by continuity (sigma^2 = 0), which is the
    complete-information pure effort or kappa.
    """
    post = posterior_mean_distribution(dist, signal)
    mom = post.moments()
    return expected_effort_of_a(a, b, c - mom.m1, mom.variance)


@dataclass(frozen=True)
class SignalCheck:
    signal: object
    full_activity: bool
    truncation: bool

    @property
    def passed(self) -> bool:
        return self.full_activity and self.truncation


@dataclass(frozen=True)
class DisclosureReport:
    certified: bool
    checks: tuple
    offending: tuple


def _degenerate_checks(a, b, c, value):
    """Complete-information reading of a signal that reveals nothing."""
    from .complete_info import (branch_admissibility, participation_check, InapplicableCriterion)
    prob = CompleteInfoProblem.make(a, b, c, value)
    eq = solve_complete(prob)
    if not participation_check(prob, eq):
        return True, False
    if isinstance(eq, MixedMoments):
        try:
            return True, branch_admissibility(prob, eq.representation)
        except InapplicableCriterion:
            return True, False
    if a == 0:
        return True, bayes.neutral_support_interior(b, value, value)
    x = eq.x_star
    # pure profile sits on the diagonal; certify with the same edge tests
    return True, (bayes.edge_quadratic_min(b, c, x, x) >= 0 and x <= 1 / value
                  and a <= b * value and c * value**2 - 2 * b * value + a >= 0)


def disclosure_literal_check(a: float, b: float, c: float, dist: TypeDistribution,
                             signals: Sequence) -> DisclosureReport:
    """Signal-by-signal sufficient conditions for the disclosure ranking to
    hold in the truncated contest.

    Each posterior-mean contest must be fully active and pass the support
    truncation check; at a = 0 the on-support test beta^2 - alpha^2 < 2b
    is accepted instead.
    """
    checks = []
    for sig in signals:
        post = posterior_mean_distribution(dist, sig)
        if isinstance(post, Degenerate):
            active, trunc = _degenerate_checks(a, b, c, post.value)
        else:
            eq = bayes.solve_bayes(a, b, c, post)
            active = True if a <= 0 else isinstance(eq, bayes.AffineBNE)
            trunc = isinstance(eq, bayes.AffineBNE) and (
                bayes.truncation_check_support(eq)
                or (a == 0 and bayes.neutral_support_interior(b, post.alpha, post.beta)))
        checks.append(SignalCheck(sig, active, trunc))
    offending = tuple(ch.signal for ch in checks if not ch.passed)
    return DisclosureReport(not offending, tuple(checks), offending)


# ------------------------------------------------------ constrained path

@dataclass(frozen=True)
class Extremum:
    s: float
    a: float
    E1: float
    F: float
    kind: str  # "max" or "min" in a


@dataclass(frozen=True)
class EffortPath:
    a: np.ndarray
    E1: np.ndarray
    regime: tuple
    dropout_rate: np.ndarray
    a_D: float
    extrema: tuple
    peak: PeakResult | None


def R_of_t(c: float, dist: TypeDistribution, t: float) -> float:
    """Log-derivative of E1 along the cutoff curve, up to a positive factor.

    E1'(t)/E1(t) = F/A + 2(c - t)F/D - 2A/B: its zeros are the extrema.
    """
    lp = lower_partial(dist, t, c)
    return lp.F / lp.A + 2 * (c - t) * lp.F / lp.D - 2 * lp.A / lp.B


def cutoff_E1(b: float, c: float, dist: TypeDistribution, t: float) -> tuple[float, float]:
    """(a_F(t), E1) at cutoff t on the constrained branch."""
    lp = lower_partial(dist, t, c)
    lam = lp.D / (2 * b * lp.B)
    return 4 * b * b * (c - t) * lp.B / lp.D**2, lam * lp.A


def constrained_extrema(b: float, c: float, dist: TypeDistribution, *, n_scan: int = 2000,
                        stol: float = 1e-11) -> list[Extremum]:
    """Extrema of E1 along the cutoff branch (a > a_D), located by sign
    changes of R on the normalized cutoff s = (t - alpha)/(beta - alpha)."""
    bayes._require_atomless(dist)
    lo, hi = dist.alpha, dist.beta
    h = hi - lo
    ss = np.linspace(0, 1, n_scan + 1)[1:-1]
    ts = lo + h * ss
    F, A, B = dist.partial_array(ts)
    r = F / A + 2 * (c - ts) * F / (B + 2 * (c - ts) * A) - 2 * A / B
    out = []
    for i in range(len(ss) - 1):
        if r[i] == 0 or r[i] * r[i + 1] < 0:
            s0 = bisect(lambda s: R_of_t(c, dist, lo + h * s), ss[i], ss[i + 1],
                        xtol=stol * 1e-3)
            t = lo + h * s0
            a, e1 = cutoff_E1(b, c, dist, t)
            # E1 rises in t where R > 0; a falls in t, so a sign change + to -
            # in t (a local max in t) is a local max in a as well
            kind = "max" if r[i] > 0 else "min"
            out.append(Extremum(float(s0), float(a), float(e1),
                                float(lower_partial(dist, t, c).F), kind))
    return out


def constrained_effort_path(b: float, c: float, dist: TypeDistribution,
                            a_grid: Sequence[float]) -> EffortPath:
    """Expected effort along the nonnegative-effort equilibrium and its extrema."""
    bayes._require_atomless(dist)
    a_arr = np.asarray(a_grid, dtype=float)
    E1 = np.empty_like(a_arr)
    drop = np.empty_like(a_arr)
    regimes = []
    for i, a in enumerate(a_arr):
        eq = bayes.solve_bayes(float(a), b, c, dist)
        E1[i] = eq.E1
        drop[i] = eq.dropout_rate
        regimes.append(eq.regime)
    mom = dist.moments()
    delta = c - mom.m1
    a_d = bayes.dropout_threshold(b, c, dist)
    pk = peak_a(b, delta, mom.variance)
    extrema = []
    if pk.a_dagger <= a_d:
        extrema.append(Extremum(1.0, pk.a_dagger, pk.E1, 1.0, "max"))
    extrema.extend(constrained_extrema(b, c, dist))
    extrema.sort(key=lambda e: e.a)
    return EffortPath(a_arr, E1, tuple(regimes), drop, a_d, tuple(extrema), pk)
