"""Variance comparisons between mechanisms and the auxiliary polynomials behind them.

``t = 1/(e^eps - 1)`` is the working variable of the quadratic forms.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core import ParameterError, as_epsilon, check_unit
from .moments import variance_analytic, worst_case_variance
from .optimize import ETA_FLOOR

__all__ = [
    "ComparisonKind",
    "comparison_polynomial",
    "noisy_variance_gaps",
    "worst_case_gap_vs_duchi",
    "FeasibilityReport",
    "scan_eta_feasibility",
    "theorem7_gap",
]


def noisy_variance_gaps(mech_a, mech_b, A: Optional[float] = None) -> float:
    """Consistency gap ``Var_a(A) - Var_b(A)`` when ``A`` is given, else the
    worst-case gap ``max Var_a - max Var_b``.  Both mechanisms must share eps."""
    ea, eb = mech_a.epsilon, mech_b.epsilon
    if not math.isclose(ea, eb, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"mechanisms use different budgets: {ea} vs {eb}")
    if A is not None:
        A = check_unit(A, "A")
        return variance_analytic(mech_a, A) - variance_analytic(mech_b, A)
    return worst_case_variance(mech_a) - worst_case_variance(mech_b)


def worst_case_gap_vs_duchi(epsilon, a: float, eta: float) -> float:
    """Type-I worst-case variance minus Duchi's, evaluated directly in eps:

    ``(eta-1)a - 1 + a/(3(eta-1)) (eta^3/(e^eps-1) + 1) - ((e^eps+1)/(e^eps-1))^2``
    """
    eps = as_epsilon(epsilon)
    em1 = math.expm1(eps)
    d = eta - 1.0
    duchi = ((em1 + 2.0) / em1) ** 2
    return d * a - 1.0 + a / (3.0 * d) * (eta**3 / em1 + 1.0) - duchi


class ComparisonKind(enum.Enum):
    S1 = "s1"        # worst-case gap vs Duchi as a quadratic in t
    P1 = "p1"        # max over A of the consistency gap vs Duchi, in t
    P2 = "p2"        # s1 with a at its lower bound (1+t)/(eta-1)
    I1 = "i1"        # lower bound of 4 - a eta^3/(3(eta-1))
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    F4 = "f4"
    CUBIC = "f"  # stationarity cubic of the fixed-q variance


def _need(value, name, kind):
    if value is None:
        raise ValueError(f"{kind.value} needs {name}")
    return float(value)


def _inv3d2(eta):
    return 1.0 / (3.0 * (eta - 1.0) ** 2)


def comparison_polynomial(kind, x: float, *, a: Optional[float] = None,
                          eta: Optional[float] = None, epsilon: Optional[float] = None) -> float:
    """Evaluate one of the named auxiliary functions.

    ``x`` is ``t`` for S1, P1, P2 and ``eta`` for the rest.
    """
    kind = ComparisonKind(kind) if not isinstance(kind, ComparisonKind) else kind
    x = float(x)
    if kind in (ComparisonKind.S1, ComparisonKind.P1):
        a = _need(a, "a", kind)
        eta = _need(eta, "eta", kind)
        t, d = x, eta - 1.0
        const = a / (3.0 * d) + d * a - (2.0 if kind is ComparisonKind.S1 else 1.0)
        return -4.0 * t * t - (4.0 - a * eta**3 / (3.0 * d)) * t + const
    if kind is ComparisonKind.P2:
        eta = _need(eta, "eta", kind)
        t, w = x, _inv3d2(eta)
        return (eta**3 * w - 4.0) * t * t + (eta**3 * w + w - 3.0) * t + w - 1.0
    eta = x
    if kind is ComparisonKind.I1:
        eps = as_epsilon(_need(epsilon, "epsilon", kind))
        e, em1 = math.exp(eps), math.expm1(eps)
        return 4.0 - 2.0 * e * eta**3 / (3.0 * em1 * (eta - 1.0) ** 2)
    if kind is ComparisonKind.F1:
        w = _inv3d2(eta)
        lin = eta**3 * w + w - 3.0
        return lin * lin - 4.0 * (eta**3 * w - 4.0) * (w - 1.0)
    if kind is ComparisonKind.F2:
        return eta**3 - 12.0 * eta**2 + 24.0 * eta - 12.0
    if kind is ComparisonKind.F3:
        return eta**3 + 3.0 * (eta - 1.0) ** 2 - 12.0 * eta + 13.0
    if kind is ComparisonKind.F4:
        return 1.0 - 3.0 * (eta - 1.0) ** 2
    eps = as_epsilon(_need(epsilon, "epsilon", kind))
    return eta**3 - 3.0 * eta**2 - 2.0 * math.expm1(eps)


@dataclass(frozen=True)
class FeasibilityReport:
    eta: float
    f1: float
    f2: float
    f3: float
    f4: float

    @property
    def system29_satisfied(self) -> bool:
        return self.f1 <= 0 and self.f2 < 0

    @property
    def system30_satisfied(self) -> bool:
        return self.f1 > 0 and self.f2 < 0 and self.f3 <= 0 and self.f4 <= 0


def scan_eta_feasibility(grid: Sequence[float]) -> list:
    """Evaluate both inequality systems at every eta in ``grid``."""
    out = []
    for eta in grid:
        eta = float(eta)
        if not eta >= ETA_FLOOR:
            raise ParameterError(f"eta={eta!r} is below the scan floor {ETA_FLOOR}")
        f = [comparison_polynomial(kind, eta) for kind in
             (ComparisonKind.F1, ComparisonKind.F2, ComparisonKind.F3, ComparisonKind.F4)]
        out.append(FeasibilityReport(eta, *f))
    return out


def theorem7_gap(epsilon, a: float, eta: float):
    """Type-II minus type-I variance at matched ``(k, a)``:
    ``a/(6(eta-1)) (2 eta^3/(e^eps-1) - 1)``.  Vectorized over ``epsilon``."""
    if not (a > 0 and eta > 1):
        raise ValueError("theorem7_gap needs a > 0 and eta > 1")
    eps = np.asarray(epsilon, dtype=float)
    out = a / (6.0 * (eta - 1.0)) * (2.0 * eta**3 / np.expm1(eps) - 1.0)
    return float(out) if out.ndim == 0 else out
