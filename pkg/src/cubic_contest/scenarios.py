"""Named reproduction scenarios: load the bundled JSON and compute every
expected quantity from the library."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import bayes, complete_info, oracle, statics
from .errors import ContestError
from .priors import Uniform, from_json
from .roots import bisect

NAMES = ("fig-effort", "fig-main", "fig-bn-peak", "two-peak", "thresholds", "dropout-uniform")


def load(name: str) -> dict:
    if name not in NAMES:
        raise ContestError(f"unknown scenario {name!r}; choose from {', '.join(NAMES)}")
    text = resources.files("cubic_contest").joinpath("scenarios", f"{name}.json").read_text()
    return json.loads(text)


def _fig_effort(scen):
    p = scen["params"]
    grid = np.linspace(p["a_from"], p["a_to"], p["n"])
    curve = complete_info.effort_curve(p["b"], p["c"], p["theta"], grid)
    mixed = np.array([r == "mixed" for r in curve.regime])
    dev = np.max(np.abs(curve.total_effort[mixed] - 2 * p["b"] / grid[mixed])) if mixed.any() else 0.0
    at = lambda a: complete_info.effort_curve(p["b"], p["c"], p["theta"], [a]).max_total  # noqa: E731
    return {"peak_a": curve.argmax_a, "peak_total_effort": curve.max_total,
            "total_effort_a4": at(4.0), "total_effort_a0": at(0.0),
            "mixed_region_max_dev_from_2b_over_a": float(dev)}


def _fig_main(scen):
    p = scen["params"]
    b, c = p["b"], p["c"]
    dist = from_json(scen["dist"])
    mom = dist.moments()
    delta = c - mom.m1
    onset = bisect(lambda a: bayes.affine_bne(a, b, c, dist).x_low, 0.0,
                   statics.positivity_boundary(b, delta, mom.variance), xtol=1e-16)
    return {"complete_info_mixed_switch": b * b / delta,
            "affine_E1_a1": bayes.affine_bne(1.0, b, c, dist).E1,
            "a_dagger": statics.peak_a(b, delta, mom.variance).a_dagger,
            "positivity_boundary": statics.positivity_boundary(b, delta, mom.variance),
            "dropout_onset": onset}


def _fig_bn_peak(scen):
    p = scen["params"]
    out = {}
    for rho in p["rhos"]:
        key = f"a_dagger_rho_{rho:g}"
        out[key] = statics.peak_a(p["b"], p["delta"], rho * p["delta"] ** 2).a_dagger
    return out


def _two_peak(scen):
    p = scen["params"]
    b, c = p["b"], p["c"]
    dist = from_json(scen["dist"])
    mom = dist.moments()
    delta = c - mom.m1
    pk = statics.peak_a(b, delta, mom.variance)
    out = {"M1": mom.m1, "variance": mom.variance, "Delta": delta,
           "a_D": bayes.dropout_threshold(b, c, dist),
           "a_dagger": pk.a_dagger, "E1_a_dagger": pk.E1}
    extrema = sorted(statics.constrained_extrema(b, c, dist), key=lambda e: -e.s)
    worst = 0.0
    for i, e in enumerate(extrema, start=1):
        out[f"extremum_{i}_s"] = e.s
        out[f"extremum_{i}_a"] = e.a
        out[f"extremum_{i}_E1"] = e.E1
        out[f"extremum_{i}_F"] = e.F
        rep = oracle.verify_equilibrium(bayes.solve_bayes(e.a, b, c, dist))
        lo, hi = rep.probability_range_on_path
        out[f"extremum_{i}_range_min"] = lo
        out[f"extremum_{i}_range_max"] = hi
        worst = max(worst, rep.raw_max_gain)
    out["max_gain_extrema"] = worst
    return out


def _thresholds(scen):
    p = scen["params"]
    th = statics.peak_variance_thresholds(p["delta"])
    b, d = p["b"], p["delta"]
    return {"y1": th.y1, "y2": th.y2, "rho1": th.rho1, "rho2": th.rho2,
            "a_dagger_ratio_rho_1e-8": statics.peak_a(b, d, 1e-8 * d * d).a_dagger / (b * b / d),
            "a_dagger_rho_1e6": statics.peak_a(b, d, 1e6 * d * d).a_dagger}


def activity_peak_boundary(b: float, c: float, m1: float) -> float:
    """Width h of the mean-preserving uniform prior at which a_D equals b^2/Delta,
    found on the generic lower-partial-moment path."""
    delta = c - m1
    target = b * b / delta
    f = lambda h: bayes.dropout_threshold(b, c, Uniform(m1 - h / 2, m1 + h / 2)) - target  # noqa: E731
    hmax = 2 * min(m1, delta) * (1 - 1e-12)
    return bisect(f, 1e-9 * hmax, hmax, xtol=1e-16)


def _dropout_uniform(scen):
    p = scen["params"]
    dist = Uniform(p["alpha"], p["beta"])
    h = activity_peak_boundary(p["b"], p["boundary_c"], p["boundary_m1"])
    delta = p["boundary_c"] - p["boundary_m1"]
    return {"a_D_closed": bayes.uniform_dropout_threshold(p["b"], p["c"], p["alpha"], p["beta"]),
            "a_D_generic": bayes.dropout_threshold(p["b"], p["c"], dist),
            "activity_peak_boundary_h_over_Delta": h / delta,
            "activity_peak_boundary_exact": h / delta}


_COMPUTE = {"fig-effort": _fig_effort, "fig-main": _fig_main, "fig-bn-peak": _fig_bn_peak,
            "two-peak": _two_peak, "thresholds": _thresholds, "dropout-uniform": _dropout_uniform}


@dataclass(frozen=True)
class Row:
    key: str
    actual: float
    expected: float
    tol: float
    provenance: str
    passed: bool


def reproduce(name: str) -> list[Row]:
    scen = load(name)
    actual = _COMPUTE[name](scen)
    rows = []
    for item in scen["expected"]:
        v = float(actual[item["key"]])
        exp = float(item["value"])
        err = abs(v - exp)
        if item.get("relative"):
            err /= abs(exp)
        ok = bool(math.isfinite(v) and err <= item["tol"])
        rows.append(Row(item["key"], v, exp, item["tol"], item["provenance"], ok))
    return rows
