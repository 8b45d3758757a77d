"""Command-line front end: solve, sweep, verify and reproduce.

Exit codes: 0 ok, 2 invalid input, 3 solver failure, 4 verification or
reproduction failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bayes, complete_info, oracle, scenarios
from .errors import ContestError, InapplicableCriterion, SolverError
from .priors import from_json

EXIT_OK, EXIT_INVALID, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4
CSV_HEADER = ["a", "regime", "E1", "variance", "dropout_rate", "payoff"]


class UsageError(ContestError):
    pass


def _num(v):
    """JSON-safe float (None for non-finite)."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _jsonable(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable)


def _fmt(v) -> str:
    return f"{float(v):.12g}"


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"invalid JSON in {path}: {exc}") from exc


# ---------------------------------------------------------------- solve

def _complete_problem(a, b, c, theta):
    return complete_info.CompleteInfoProblem.make(a, b, c, theta)


def complete_document(prob: complete_info.CompleteInfoProblem) -> dict:
    eq = complete_info.solve_complete(prob)
    doc = {"problem": {"mode": "complete", "a": prob.a, "b": prob.b, "c": prob.c,
                       "theta": prob.theta}}
    derived = {"kappa": None if prob.a == 0 else prob.kappa,
               "zeta": None if prob.a == 0 else prob.zeta,
               "s": prob.s if prob.mixed_region else None}
    checks = {"participation": complete_info.participation_check(prob, eq)}
    if isinstance(eq, complete_info.PureSymmetric):
        body = {"kind": "pure", "x_star": eq.x_star, "E1": eq.x_star, "variance": 0.0,
                "payoff": eq.payoff}
    else:
        rep = eq.representation
        body = {"kind": "mixed", "mean": eq.mean, "E1": eq.mean, "variance": eq.variance,
                "payoff": eq.payoff,
                "representation": {"branch": rep.branch.value, "points": list(rep.points),
                                   "probabilities": list(rep.probabilities)}}
        try:
            checks["branch_admissibility"] = complete_info.branch_admissibility(prob, rep)
        except InapplicableCriterion:
            checks["branch_admissibility"] = "inapplicable"
        checks["local_support"] = complete_info.local_support_check(prob, rep)
        checks["simple_sufficient"] = complete_info.simple_sufficient_check(prob)
    doc["equilibrium"] = {**body, **{k: _num(v) for k, v in derived.items()}}
    doc["checks"] = checks
    return doc


def bayes_document(a, b, c, dist) -> dict:
    eq = bayes.solve_bayes(a, b, c, dist)
    doc = {"problem": {"mode": "bayes", "a": a, "b": b, "c": c, "dist": dist.to_json()}}
    body = {"kind": eq.regime, "E1": eq.E1, "E2": eq.E2, "variance": eq.variance,
            "dropout_rate": eq.dropout_rate}
    checks = {}
    if isinstance(eq, bayes.AffineBNE):
        body.update(k=eq.k, d=eq.d, kappa=_num(eq.kappa), zeta=_num(eq.zeta),
                    omega=_num(eq.omega), x_low=eq.x_low, x_high=eq.x_high)
        r1, r2 = eq.residuals()
        checks.update(truncation_simple=bayes.truncation_check_simple(eq),
                      truncation_support=bayes.truncation_check_support(eq),
                      moment_residuals=[r1, r2])
    elif isinstance(eq, bayes.CutoffAffine):
        body.update(t=eq.t, lam=eq.lam, k=eq.k, d=eq.d)
        checks.update(fixed_point_residuals=[float(r) for r in eq.residuals],
                      additional_roots_detected=eq.extra_roots)
    else:
        body.update(p=eq.p, x_high=eq.x_high, atom_mass=eq.atom_mass,
                    representation=eq.representation)
    doc["equilibrium"] = body
    doc["checks"] = checks
    return doc


def _problem_from_args(args) -> tuple[str, tuple]:
    if args.mode == "complete":
        if args.theta is None:
            raise UsageError("--theta is required for complete-information problems")
        return "complete", (args.a, args.b, args.c, args.theta)
    if args.dist is None:
        raise UsageError("--dist is required for Bayesian problems")
    return "bayes", (args.a, args.b, args.c, from_json(_read_json(args.dist)))


def _problem_from_doc(problem: dict) -> tuple[str, tuple]:
    try:
        mode = problem["mode"]
        a, b, c = float(problem["a"]), float(problem["b"]), float(problem["c"])
        if mode == "complete":
            return mode, (a, b, c, float(problem["theta"]))
        if mode == "bayes":
            return mode, (a, b, c, from_json(problem["dist"]))
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed problem section: {exc!r}") from exc
    raise UsageError(f"unknown problem mode {problem.get('mode')!r}")


def _solve(mode, params):
    if mode == "complete":
        prob = _complete_problem(*params)
        return complete_document(prob), complete_info.solve_complete(prob)
    return bayes_document(*params), bayes.solve_bayes(*params)


def cmd_solve(args) -> tuple[int, str]:
    doc, _ = _solve(*_problem_from_args(args))
    return EXIT_OK, _dumps(doc)


# ---------------------------------------------------------------- sweep

def sweep_rows(a_grid, b, c, theta=None, dist=None) -> list[list]:
    rows = []
    for a in a_grid:
        a = float(a)
        if dist is None:
            prob = _complete_problem(a, b, c, theta)
            eq = complete_info.solve_complete(prob)
            if isinstance(eq, complete_info.PureSymmetric):
                rows.append([a, "pure", eq.x_star, 0.0, 0.0, eq.payoff])
            else:
                rows.append([a, "mixed", eq.mean, eq.variance, 0.0, eq.payoff])
        else:
            eq = bayes.solve_bayes(a, b, c, dist)
            rows.append([a, eq.regime, eq.E1, eq.variance, eq.dropout_rate,
                         ex_ante_payoff(eq)])
    return rows


def ex_ante_payoff(eq) -> float:
    """1/2 - E[theta x(theta)]: symmetric play wins half the time on average."""
    dist = eq.dist
    if isinstance(eq, bayes.AffineBNE):
        mom = dist.moments()
        return 0.5 - (eq.k * mom.m2 + eq.d * mom.m1)
    if isinstance(eq, bayes.CutoffAffine):
        lp = bayes.lower_partial(dist, eq.t, eq.c)
        return 0.5 - eq.lam * (eq.t * lp.A - lp.B)
    return 0.5 - dist.alpha * eq.E1


def cmd_sweep(args) -> tuple[int, str]:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if args.var != "a":
        raise UsageError("only --var a is supported")
    grid = np.linspace(args.start, args.stop, args.n)
    if (args.theta is None) == (args.dist is None):
        raise UsageError("give exactly one of --theta (complete information) or --dist (Bayesian)")
    dist = from_json(_read_json(args.dist)) if args.dist else None
    rows = sweep_rows(grid, args.b, args.c, theta=args.theta, dist=dist)
    if args.format == "json":
        return EXIT_OK, _dumps([dict(zip(CSV_HEADER, r)) for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([_fmt(r[0]), r[1]] + [_fmt(v) for v in r[2:]])
    return EXIT_OK, buf.getvalue()


# --------------------------------------------------------------- verify

def cmd_verify(args) -> tuple[int, str]:
    if args.scenario:
        doc = _read_json(args.scenario)
        if "problem" not in doc:
            raise UsageError("scenario file has no 'problem' section")
        mode, params = _problem_from_doc(doc["problem"])
    else:
        mode, params = _problem_from_args(args)
    _, eq = _solve(mode, params)
    rep = oracle.verify_equilibrium(eq, grid_n=args.grid_n, x_max=args.x_max)
    out = rep.to_json()
    out["passed"] = rep.passed
    return (EXIT_OK if rep.passed else EXIT_VERIFY), _dumps(out)


# ------------------------------------------------------------ reproduce

def cmd_reproduce(args) -> tuple[int, str]:
    rows = scenarios.reproduce(args.name)
    ok = all(r.passed for r in rows)
    if args.format == "json":
        text = _dumps({"scenario": args.name, "passed": ok,
                       "rows": [r.__dict__ for r in rows]})
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["key", "actual", "expected", "tol", "provenance", "status"])
        for r in rows:
            w.writerow([r.key, _fmt(r.actual), _fmt(r.expected), f"{r.tol:g}", r.provenance,
                        "PASS" if r.passed else "FAIL"])
        text = buf.getvalue()
    return (EXIT_OK if ok else EXIT_VERIFY), text


# ----------------------------------------------------------------- main

def _add_problem_args(p, required=True):
    p.add_argument("--a", type=float, required=required)
    p.add_argument("--b", type=float, required=required)
    p.add_argument("--c", type=float, required=required)
    p.add_argument("--theta", type=float)
    p.add_argument("--dist", help="distribution JSON file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubic-contest",
                                 description="Equilibria of the truncated cubic contest.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve one problem and print JSON")
    sp.add_argument("mode", choices=["complete", "bayes"])
    _add_problem_args(sp)
    sp.set_defaults(func=cmd_solve, format="json")

    sw = sub.add_parser("sweep", help="sweep a over a grid and print CSV")
    sw.add_argument("--var", default="a")
    sw.add_argument("--from", dest="start", type=float, required=True)
    sw.add_argument("--to", dest="stop", type=float, required=True)
    sw.add_argument("--n", type=int, required=True)
    sw.add_argument("--b", type=float, required=True)
    sw.add_argument("--c", type=float, required=True)
    sw.add_argument("--theta", type=float)
    sw.add_argument("--dist")
    sw.add_argument("--format", choices=["csv", "json"], default="csv")
    sw.set_defaults(func=cmd_sweep)

    vf = sub.add_parser("verify", help="certify a solution with the brute-force oracle")
    vf.add_argument("--scenario", help="JSON file with a 'problem' section (e.g. solve output)")
    vf.add_argument("--mode", choices=["complete", "bayes"])
    _add_problem_args(vf, required=False)
    vf.add_argument("--grid-n", type=int, default=10_000)
    vf.add_argument("--x-max", type=float)
    vf.set_defaults(func=cmd_verify, format="json")

    rp = sub.add_parser("reproduce", help="recompute a named scenario")
    rp.add_argument("name")
    rp.add_argument("--format", choices=["csv", "json"], default="csv")
    rp.set_defaults(func=cmd_reproduce)

    for p in (sp, sw, vf, rp):
        p.add_argument("--out", help="output path (default: standard output)")
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify" and not args.scenario:
            if args.mode is None or None in (args.a, args.b, args.c):
                raise UsageError("verify needs --scenario or --mode with --a --b --c")
        if getattr(args, "format", "json") == "csv" and args.command in ("solve", "verify"):
            raise UsageError("solve and verify emit JSON only")
        code, text = args.func(args)
    except (ContestError, ValueError) as exc:
        return _fail(EXIT_INVALID, "invalid_input", exc)
    except SolverError as exc:
        return _fail(EXIT_SOLVER, "solver_failure", exc)
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


def _fail(code: int, kind: str, exc: Exception) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": str(exc), "exit_code": code}) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
