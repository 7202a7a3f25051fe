"""Lower bound ``theta1/(e^eps-1)^2 + theta2/(e^eps-1)`` on the type-I worst-case variance."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import as_epsilon

__all__ = ["LowerBoundConstants", "CONSTANTS", "LowerBoundPoint", "lower_bound_curves",
           "h2_quadratic", "psi1", "psi2"]


@dataclass(frozen=True)
class LowerBoundConstants:
    """Tangency constants making ``psi1`` and ``psi2`` non-negative for eta > 1."""

    theta1: float
    theta2: float

    @classmethod
    def compute(cls) -> "LowerBoundConstants":
        s3 = math.sqrt(3.0)
        # real root of c^3 - 3c - 4 = 0
        c = (2.0 + s3) ** (1.0 / 3.0) + (2.0 - s3) ** (1.0 / 3.0)
        theta2 = 1.0 + ((1.0 + c) ** 3 + 1.0) / (3.0 * c * c)
        return cls(9.0 / 4.0, theta2)

    def to_dict(self) -> dict:
        return {"theta1": self.theta1, "theta2": self.theta2}


CONSTANTS = LowerBoundConstants.compute()


def psi1(eta: float) -> float:
    return eta**3 - 3.0 * CONSTANTS.theta1 * (eta - 1.0) ** 2


def psi2(eta: float) -> float:
    return eta**3 - 3.0 * (CONSTANTS.theta2 - 1.0) * (eta - 1.0) ** 2 + 1.0


def h2_quadratic(t: float, eta: float) -> float:
    """``(psi1 t^2 + psi2 t + 1) / (3 (eta-1)^2)``."""
    return (psi1(eta) * t * t + psi2(eta) * t + 1.0) / (3.0 * (eta - 1.0) ** 2)


@dataclass(frozen=True)
class LowerBoundPoint:
    g1: float
    h1: float
    h2: float
    psi1: float
    psi2: float


def lower_bound_curves(epsilon, eta: float) -> LowerBoundPoint:
    """Evaluate ``g1(eps)``, ``h1(eps, eta)``, ``h2 = h1 - g1`` and ``psi1/2(eta)``.

    ``h1`` is the type-I worst-case variance with ``a`` at its lower limit
    ``e^eps / ((e^eps-1)(eta-1))``.
    """
    eps = as_epsilon(epsilon)
    if not eta > 1.0:
        raise ValueError(f"eta must exceed 1, got {eta}")
    em1 = math.expm1(eps)
    e = em1 + 1.0
    d2 = (eta - 1.0) ** 2
    g1 = CONSTANTS.theta1 / em1**2 + CONSTANTS.theta2 / em1
    h1 = 1.0 / em1 + e * eta**3 / (3.0 * em1**2 * d2) + e / (3.0 * em1 * d2)
    return LowerBoundPoint(g1, h1, h1 - g1, psi1(eta), psi2(eta))
