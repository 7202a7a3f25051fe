"""Where Duchi's variance overtakes Laplace's."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy import optimize

from ..core import check_unit

__all__ = ["crossover_gap", "crossover_root"]


def crossover_gap(epsilon, A):
    """``((e^eps+1)/(e^eps-1))^2 - A^2 - 8/eps^2``: Duchi minus Laplace variance.

    Negative means Duchi's report is less noisy.  Vectorized over ``epsilon``.
    """
    eps = np.asarray(epsilon, dtype=float)
    atom = 1.0 + 2.0 / np.expm1(eps)
    out = atom * atom - A * A - 8.0 / (eps * eps)
    return float(out) if out.ndim == 0 else out


def crossover_root(A: float, bracket=(0.01, 10.0), tol: float = 1e-10,
                   scan_points: int = 1000, maxiter: int = 200) -> Optional[float]:
    """First root of :func:`crossover_gap` in ``bracket``, or ``None``.

    A log-spaced scan locates a sign change, then bisection refines it until
    ``|gap| <= tol`` or the bracket collapses to rounding level.
    """
    A = check_unit(A, "A")
    lo, hi = (float(b) for b in bracket)
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")
    grid = np.geomspace(lo, hi, scan_points)
    vals = crossover_gap(grid, A)
    zero = np.flatnonzero(vals == 0.0)
    change = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    if zero.size and (not change.size or zero[0] <= change[0]):
        return float(grid[zero[0]])
    if not change.size:
        return None
    i = int(change[0])
    root = optimize.bisect(lambda e: crossover_gap(e, A), grid[i], grid[i + 1],
                           xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=maxiter,
                           disp=False)
    if abs(crossover_gap(root, A)) > tol:
        raise ArithmeticError(f"bisection stalled at eps={root!r} with gap {crossover_gap(root, A)!r}")
    return float(root)
