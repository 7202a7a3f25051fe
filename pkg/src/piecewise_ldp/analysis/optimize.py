"""Choosing eta: the fixed-q closed form and a numeric search over the normalized family."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import optimize as _opt

from ..core import (PttFamily, as_epsilon, check_unit, derive_ptt_params,
                    eta_upper_bound, optimal_eta)
from .moments import ptt_variance

__all__ = [
    "ETA_FLOOR",
    "OptimalEta",
    "eta_cubic",
    "optimal_eta_closed_form",
    "fixed_q_variance",
    "normalized_variance",
    "MinVariance",
    "min_variance_numeric",
]

# smallest eta accepted by scanners; (eta - 1)^-2 terms blow up below it
ETA_FLOOR = 1.0 + 1e-6


def eta_cubic(eta, epsilon):
    """Stationarity cubic ``eta^3 - 3 eta^2 - 2 (e^eps - 1)``."""
    eta = np.asarray(eta, dtype=float)
    out = eta**3 - 3.0 * eta**2 - 2.0 * math.expm1(as_epsilon(epsilon))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OptimalEta:
    eta0: float
    residual: float
    a: Optional[float] = None  # band half-width for the supplied q


def optimal_eta_closed_form(epsilon, q: Optional[float] = None) -> OptimalEta:
    """Cardano root of :func:`eta_cubic`, its residual, and ``a`` for a given ``q``.

    With ``k = e^eps / (q (e^eps - 1))`` held fixed the type-I variance is
    minimized at ``eta0``, giving ``a = k / (eta0 - 1)``.
    """
    eps = as_epsilon(epsilon)
    eta0 = optimal_eta(eps)
    a = None
    if q is not None:
        q = float(q)
        if not (0.0 < q <= 1.0):
            raise ValueError(f"q must lie in (0, 1], got {q}")
        em1 = math.expm1(eps)
        a = (em1 + 1.0) / (q * em1) / (eta0 - 1.0)
    return OptimalEta(eta0, eta_cubic(eta0, eps), a)


def fixed_q_variance(eta, epsilon, q: float, A: float = 0.0):
    """Type-I variance with ``k`` pinned by ``q``, as a function of ``eta``.

    ``(k-1)A^2 + k/(3(eta-1)^2) (eta^3/(e^eps-1) + 1)``; this is the curve whose
    minimum sits at ``eta0`` for every ``q`` and ``A``.
    """
    eps = as_epsilon(epsilon)
    em1 = math.expm1(eps)
    k = (em1 + 1.0) / (q * em1)
    eta = np.asarray(eta, dtype=float)
    out = (k - 1.0) * A * A + k / (3.0 * (eta - 1.0) ** 2) * (eta**3 / em1 + 1.0)
    return float(out) if out.ndim == 0 else out


def normalized_variance(eta: float, epsilon, A: float, family) -> float:
    """Variance at ``A`` of the normalized PTT with shape ratio ``eta``."""
    return ptt_variance(derive_ptt_params(epsilon, eta, family), A)


@dataclass(frozen=True)
class MinVariance:
    eta_star: float
    var_star: float
    at_boundary: bool


def min_variance_numeric(epsilon, A: float, family, width: float = 1e-6,
                         grid_points: int = 2001) -> MinVariance:
    """Minimize :func:`normalized_variance` over the admissible eta interval.

    A log-spaced grid in ``eta - 1`` brackets the minimum, then golden-section
    search narrows it to ``width``.  If the best grid point is the upper end of
    the admissible interval, that end is returned with ``at_boundary=True``.
    """
    eps = as_epsilon(epsilon)
    A = check_unit(A, "A")
    family = PttFamily.parse(family)
    hi = eta_upper_bound(eps, family)
    if hi <= ETA_FLOOR:
        raise ValueError(f"admissible eta interval is empty at epsilon={eps}")

    def f(eta):
        return normalized_variance(min(max(eta, ETA_FLOOR), hi), eps, A, family)

    grid = 1.0 + np.geomspace(ETA_FLOOR - 1.0, hi - 1.0, grid_points)
    grid[-1] = hi
    vals = np.array([f(x) for x in grid])
    i = int(np.argmin(vals))
    if i == grid_points - 1:
        return MinVariance(hi, float(vals[i]), True)
    if i == 0:
        return MinVariance(float(grid[0]), float(vals[0]), True)
    x0, x1, x2 = grid[i - 1], grid[i], grid[i + 1]
    res = _opt.minimize_scalar(f, bracket=(x0, x1, x2), method="golden",
                               options={"xtol": 0.25 * width / max(abs(x2), 1.0)})
    eta_star = float(res.x)
    return MinVariance(eta_star, f(eta_star), False)
