"""Bracketing root finders: bisection with secant polishing, grid sign scans."""
from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

from .errors import SolverError


def bisect(f: Callable[[float], float], lo: float, hi: float, *,
           xtol: float = 1e-15, ftol: float = 0.0, maxiter: int = 400) -> float:
    """Root of ``f`` in [lo, hi] given a sign change.

    Each step tries a secant (regula falsi) point; when that fails to halve
    the bracket a bisection step follows, so convergence is never slower
    than plain bisection.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0) == (fhi > 0):
        raise SolverError(f"no sign change on [{lo!r}, {hi!r}]: f = {flo!r}, {fhi!r}")
    for _ in range(maxiter):
        width = hi - lo
        if width <= xtol * max(1.0, abs(lo), abs(hi)):
            break
        x = hi - fhi * (hi - lo) / (fhi - flo)
        if lo < x < hi:
            fx = f(x)
            if fx == 0 or abs(fx) <= ftol:
                return x
            if (fx > 0) == (flo > 0):
                lo, flo = x, fx
            else:
                hi, fhi = x, fx
            if hi - lo <= 0.5 * width:
                continue
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0 or abs(fm) <= ftol:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


def sign_change_brackets(values: np.ndarray, grid: Sequence[float]) -> list[tuple[float, float]]:
    """Adjacent grid cells over which ``values`` changes sign (zeros count)."""
    v = np.asarray(values, dtype=float)
    g = np.asarray(grid, dtype=float)
    out = []
    for i in range(len(v) - 1):
        if v[i] == 0:
            out.append((g[i], g[i]))
        elif v[i] * v[i + 1] < 0:
            out.append((g[i], g[i + 1]))
    if len(v) and v[-1] == 0:
        out.append((g[-1], g[-1]))
    return out


def golden_max(f: Callable[[float], float], lo: float, hi: float, *,
               tol: float = 1e-12, maxiter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal function on [lo, hi] by golden-section search."""
    invphi = (math.sqrt(5) - 1) / 2
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(maxiter):
        if hi - lo <= tol * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)
