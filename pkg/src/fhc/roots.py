"""Scalar root finding: bracketed bisection, bracket expansion, Newton polish."""
from __future__ import annotations

import math
from typing import Callable

from .errors import NonConvergence

Func = Callable[[float], float]


def bisect(f: Func, lo: float, hi: float, *, xtol: float = 0.0, rtol: float = 4e-16,
           maxiter: int = 400) -> float:
    """Bisection on a sign change of ``f`` over ``[lo, hi]``.

    Runs until the bracket is narrower than ``xtol + rtol*|mid|`` or the
    midpoint stops moving in floating point.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NonConvergence(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= xtol + rtol * abs(mid):
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bisect_geometric(f: Func, lo: float, hi: float, *, rtol: float = 4e-16,
                     maxiter: int = 400) -> float:
    """Bisection in log space for a positive bracket spanning many decades."""
    if lo <= 0:
        raise ValueError("geometric bisection needs lo > 0")
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NonConvergence(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(maxiter):
        if hi / lo > 4.0:
            mid = math.sqrt(lo * hi)
        else:
            mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or hi - lo <= rtol * mid:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def expand_upper(f: Func, lo: float, hi: float, *, factor: float = 2.0, limit: int = 200) -> float:
    """Grow ``hi`` geometrically until ``f`` changes sign relative to ``f(lo)``."""
    flo = f(lo)
    for _ in range(limit):
        fhi = f(hi)
        if fhi == 0.0 or (fhi > 0) != (flo > 0):
            return hi
        hi *= factor
    raise NonConvergence(f"bracket expansion failed after {limit} steps (hi={hi!r})")


def newton_polish(f: Func, df: Func, x: float, *, steps: int = 3) -> float:
    """A few Newton steps; keeps the best point by |f|."""
    best, fbest = x, abs(f(x))
    for _ in range(steps):
        d = df(x)
        if d == 0.0 or not math.isfinite(d):
            break
        x = x - f(x) / d
        fx = abs(f(x))
        if not math.isfinite(fx):
            break
        if fx < fbest:
            best, fbest = x, fx
        if fx == 0.0:
            break
    return best
