import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cubic_contest.csf import (ContestTechnology, clamp_probability, cross_partial,
                               effort_profile, in_admissible_domain, raw_probability,
                               raw_probability_zd, truncated_probability, tullock_cross_partial)
from cubic_contest.errors import ContestError, SolverError
from cubic_contest.roots import bisect, golden_max, sign_change_brackets

from oracles import cubic

reals = st.floats(-20, 20, allow_nan=False)
pos = st.floats(0.05, 20, allow_nan=False)
effort = st.floats(0, 10, allow_nan=False)


def test_technology_validation():
    with pytest.raises(ContestError):
        ContestTechnology(1.0, 0.0, 1.0)
    with pytest.raises(ContestError):
        ContestTechnology(1.0, 1.0, -1.0)
    with pytest.raises(ContestError):
        ContestTechnology(math.inf, 1.0, 1.0)
    with pytest.raises(ContestError):
        ContestTechnology(0.0, 1.0, 1.0).kappa()
    assert ContestTechnology(2.0, 1.0, 1.0).kappa() == 0.5
    with pytest.raises(ContestError):
        effort_profile(-0.1, 1.0)


def test_raw_probability_examples():
    assert raw_probability(ContestTechnology(1, 17 / 16, 1), 0.3, 0.3) == 0.5
    v = raw_probability(ContestTechnology(0.5, 17 / 16, 1), 0.6, 0.2)
    assert v == pytest.approx(0.584, abs=1e-14)
    assert v == pytest.approx(raw_probability_zd(ContestTechnology(0.5, 17 / 16, 1), 0.6, 0.2), abs=1e-14)
    assert raw_probability(ContestTechnology(-3, 2, 5), 0, 0) == 0.5


def test_clamp_examples():
    assert clamp_probability(0.5) == 0.5
    assert clamp_probability(1.3) == 1.0
    assert clamp_probability(-0.2) == 0.0
    tech = ContestTechnology(0, 1, 1)
    assert truncated_probability(tech, 10, 0) == 0.0
    assert truncated_probability(tech, 0, 10) == 1.0


def test_cross_partial_examples():
    assert cross_partial(ContestTechnology(2, 1, 1), 0.7, 0.7) == 0
    assert cross_partial(ContestTechnology(2, 1, 1), 1, 0.5) == pytest.approx(2.0)
    assert cross_partial(ContestTechnology(-1, 1, 1), 1, 0.5) == pytest.approx(-1.0)


def _fd_cross(f, x, y, h=1e-5):
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h)


@pytest.mark.parametrize("a,expected", [(2.0, 2.0), (-1.0, -1.0)])
def test_cross_partial_matches_independent_fd(a, expected):
    fd = _fd_cross(lambda x, y: cubic(a, 1.0, 1.0, x, y), 1.0, 0.5)
    assert fd == pytest.approx(expected, abs=1e-6)


def test_domain_examples():
    tech = ContestTechnology(3, 1, 1)
    assert in_admissible_domain(tech, 5, 5)
    assert raw_probability(ContestTechnology(0, 1, 1), 10, 0) == -89.5
    assert not in_admissible_domain(ContestTechnology(0, 1, 1), 10, 0)
    # boundary points are outside: P = 0 exactly
    tech0 = ContestTechnology(0, 1, 1)
    x = (1 + math.sqrt(3)) / 2  # 1/2 + x(1 - x) = 0
    assert abs(raw_probability(tech0, x, 0)) < 1e-15
    assert not in_admissible_domain(tech0, x + 1e-9, 0)


def test_domain_strict_at_boundary():
    tech = ContestTechnology(0, 1, 1.5)
    # P(1, 0) = 1/2 + (1.5 - 1) = 1 exactly
    assert raw_probability(tech, 1.0, 0.0) == 1.0
    assert not in_admissible_domain(tech, 1.0, 0.0)


def test_tullock_examples():
    assert tullock_cross_partial(1, 3, 3) == 0
    assert tullock_cross_partial(1, 2, 1) == pytest.approx(1 / 27, abs=1e-15)
    assert tullock_cross_partial(2, 1, 2) < 0
    with pytest.raises(ContestError):
        tullock_cross_partial(1, 0, 1)
    with pytest.raises(ContestError):
        tullock_cross_partial(0, 1, 1)


def test_tullock_matches_fd():
    f = lambda x, y: x / (x + y)  # noqa: E731
    assert tullock_cross_partial(1, 2, 1) == pytest.approx(_fd_cross(f, 2.0, 1.0, 1e-4), abs=1e-8)


@settings(max_examples=300, deadline=None)
@given(reals, pos, pos, effort, effort)
def test_antisymmetry(a, b, c, x, y):
    tech = ContestTechnology(a, b, c)
    assert abs(raw_probability(tech, x, y) + raw_probability(tech, y, x) - 1) < 1e-12


@settings(max_examples=200, deadline=None)
@given(reals, pos, pos, st.floats(0, 3), st.floats(0, 3))
def test_cross_partial_fd(a, b, c, x, y):
    tech = ContestTechnology(a, b, c)
    fd = _fd_cross(lambda u, v: cubic(a, b, c, u, v), x, y, 1e-3)
    assert cross_partial(tech, x, y) == pytest.approx(fd, abs=1e-6)


@settings(max_examples=200, deadline=None)
@given(reals, pos, pos, effort, effort)
def test_zd_coordinates_agree(a, b, c, x, y):
    tech = ContestTechnology(a, b, c)
    scale = 1 + abs(a) * 100 + b * 20 + c * 10
    assert raw_probability(tech, x, y) == pytest.approx(raw_probability_zd(tech, x, y), abs=1e-11 * scale * 100)


@settings(max_examples=200, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 3), st.floats(0, 3))
def test_degree_two_family_has_no_cross_partial(q0, q1, x, y):
    f = lambda u, v: 0.5 + q0 * (u - v) + q1 * (u * u - v * v)  # noqa: E731
    assert abs(_fd_cross(f, x, y, 1e-2)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(reals, pos, pos, effort)
def test_diagonal_admissible(a, b, c, x):
    assert in_admissible_domain(ContestTechnology(a, b, c), x, x)


@settings(max_examples=100, deadline=None)
@given(reals, pos, pos, st.floats(0, 2), st.floats(0.01, 1), st.floats(0, math.pi / 2))
def test_rays_leave_domain(a, b, c, z, d, phi):
    tech = ContestTechnology(a, b, c)
    ux, uy = math.cos(phi), math.sin(phi)
    assume(abs(ux - uy) > 1e-2)
    r = np.linspace(0, 1e3, 20001)
    inside = np.asarray(in_admissible_domain(tech, z + r * ux, z + d + r * uy))
    # once outside near the end of the scan, the ray stays outside
    assert not inside[-2000:].any()


@settings(max_examples=300, deadline=None)
@given(st.floats(0.1, 5), st.floats(1e-3, 50), st.floats(1e-3, 50))
def test_tullock_sign(r, x, y):
    assume(abs(x - y) > 1e-9 * max(x, y))
    assert np.sign(tullock_cross_partial(r, x, y)) == np.sign(x - y)


def test_vectorized_shapes():
    tech = ContestTechnology(1, 1, 1)
    out = raw_probability(tech, np.array([0.1, 0.2]), 0.3)
    assert out.shape == (2,)
    assert isinstance(raw_probability(tech, 0.1, 0.2), float)


def test_root_helpers():
    r = bisect(lambda x: x * x - 2, 0, 2)
    assert r == pytest.approx(math.sqrt(2), abs=1e-15)
    with pytest.raises(SolverError):
        bisect(lambda x: x * x + 1, 0, 2)
    grid = np.linspace(-1, 1, 5)
    assert sign_change_brackets(np.sin(grid * 3), grid)
    x, v = golden_max(lambda x: -(x - 0.3) ** 2, 0, 1)
    assert x == pytest.approx(0.3, abs=1e-6)
