"""Safeguarded Newton iteration for strictly increasing scalar functions."""
from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import DomainError


def increasing_root(
    f: Callable[[float], float],
    target: float,
    lo: float,
    hi: float,
    df: Optional[Callable[[float], float]] = None,
    rtol: float = 1e-13,
    max_iter: int = 200,
) -> float:
    """Solve ``f(x) = target`` on ``[lo, hi]`` where ``f`` is increasing.

    Newton steps are taken when they stay inside the current bracket;
    otherwise the bracket is bisected. Stops on relative residual
    ``rtol`` or when the bracket collapses to machine resolution.
    """
    flo = f(lo) - target
    fhi = f(hi) - target
    if flo > 0 or fhi < 0:
        raise DomainError(f"target {target!r} not bracketed by [{lo!r}, {hi!r}]")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    x = 0.5 * (lo + hi)
    scale = abs(target) if target != 0 else 1.0
    for _ in range(max_iter):
        fx = f(x) - target
        if abs(fx) <= rtol * scale:
            return x
        if fx < 0:
            lo = x
        else:
            hi = x
        if hi - lo <= 4 * math.ulp(max(abs(lo), abs(hi))):
            return x
        step_ok = False
        if df is not None:
            d = df(x)
            if d > 0 and math.isfinite(d):
                xn = x - fx / d
                if lo < xn < hi:
                    x = xn
                    step_ok = True
        if not step_ok:
            x = 0.5 * (lo + hi)
    raise DomainError(f"root solve did not converge within {max_iter} iterations")
