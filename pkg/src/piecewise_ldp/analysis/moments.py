"""Closed-form report variances and an exact piecewise-integration oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..core import PttFamily, PttParams, check_unit
from ..mechanisms import Duchi, Laplace, Ptt, duchi_atom

__all__ = [
    "Moments",
    "variance_analytic",
    "ptt_variance",
    "worst_case_variance",
    "density_pieces",
    "moments_by_quadrature",
    "central_moment",
]


def _params_of(mech):
    if isinstance(mech, Ptt):
        return mech.params
    if isinstance(mech, PttParams):
        return mech
    return None


def ptt_variance(params: PttParams, A: float) -> float:
    """Report variance of a PTT at input ``A``.

    Type I: ``(k-1)A^2 + a/(3(eta-1)) (eta^3/(e^eps-1) + 1)``
    Type II: ``(k-1)A^2 + a/(6(eta-1)) (4 eta^3/(e^eps-1) + 1)``
    """
    em1 = math.expm1(params.epsilon)
    d = params.eta - 1.0
    lead = (params.k - 1.0) * A * A
    if params.family is PttFamily.TYPE_I:
        return lead + params.a / (3.0 * d) * (params.eta**3 / em1 + 1.0)
    return lead + params.a / (6.0 * d) * (4.0 * params.eta**3 / em1 + 1.0)


def variance_analytic(mech, A: float) -> float:
    """Variance of a single noisy report of ``A`` under ``mech``."""
    A = check_unit(A, "A")
    if isinstance(mech, Laplace):
        return 8.0 / mech.epsilon**2
    if isinstance(mech, Duchi):
        return mech.atom**2 - A * A
    params = _params_of(mech)
    if params is None:
        raise TypeError(f"unsupported mechanism {mech!r}")
    return ptt_variance(params, A)


def worst_case_variance(mech) -> float:
    """``max_A Var(A)`` over [-1, 1] in closed form.

    Duchi peaks at ``A = 0``; a PTT with ``k > 1`` (every normalized bundle)
    peaks at ``|A| = 1``.
    """
    if isinstance(mech, Laplace):
        return 8.0 / mech.epsilon**2
    if isinstance(mech, Duchi):
        return mech.atom**2
    params = _params_of(mech)
    if params is None:
        raise TypeError(f"unsupported mechanism {mech!r}")
    return max(ptt_variance(params, 1.0), ptt_variance(params, 0.0))


def density_pieces(params: PttParams, A: float) -> list:
    """Split the PTT density into linear pieces ``(x0, width, f0, f1)``.

    On each piece the density runs linearly from ``f0`` at ``x0`` to ``f1`` at
    ``x0 + width``.  Widths are carried exactly (``a``, ``k(1 +- A)``) rather
    than recovered as differences of nearby endpoints.
    """
    k, a, B, p = params.k, params.a, params.B, params.p
    c = k * A
    base = params.out_density
    left, right = k * (1.0 + A), k * (1.0 - A)
    pieces = []
    if left > 0:
        pieces.append((-B, left, base, base))
    if params.family is PttFamily.TYPE_I:
        pieces.append((c - a, 2.0 * a, p, p))
    else:
        pieces.append((c - a, a, base, p))
        pieces.append((c, a, p, base))
    if right > 0:
        pieces.append((c + a, right, base, base))
    return pieces


def _moment(pieces, order: int, shift: float) -> float:
    """``int (x - shift)^order f(x) dx`` summed exactly over linear pieces.

    Each piece is integrated in local coordinates ``u = x - x0`` so narrow,
    steep pieces do not cancel against their own intercept.
    """
    terms = []
    m = order
    for x0, w, f0, f1 in pieces:
        d = x0 - shift
        rise = f1 - f0
        for j in range(m + 1):
            wj = w ** (j + 1)
            terms.append(math.comb(m, j) * d ** (m - j) * (f0 * wj / (j + 1) + rise * wj / (j + 2)))
    return math.fsum(terms)


@dataclass(frozen=True)
class Moments:
    mass: float
    mean: float
    variance: float


def moments_by_quadrature(params: PttParams, A: float) -> Moments:
    """Mass, mean and variance of the PTT density by exact integration.

    Integrals are taken about ``A`` to limit cancellation; the variance is the
    raw ``int x^2 f - (int x f)^2``, which for a normalized density is the
    usual variance.
    """
    A = check_unit(A, "A")
    pieces = density_pieces(params, A)
    mass = _moment(pieces, 0, A)
    # an even density has odd moments about 0 that vanish exactly
    m1 = 0.0 if A == 0.0 else _moment(pieces, 1, A)
    m2 = _moment(pieces, 2, A)
    mean = m1 + A * mass
    second = m2 + 2.0 * A * m1 + A * A * mass
    if abs(mass - 1.0) <= 1e-12:
        variance = m2 - m1 * m1
    else:
        variance = second - mean * mean
    return Moments(mass, mean, variance)


def central_moment(mech, A: float, order: int) -> float:
    """Central moment of the report distribution (used for Monte Carlo error bars)."""
    A = check_unit(A, "A")
    if isinstance(mech, Laplace):
        b = 2.0 / mech.epsilon
        return 0.0 if order % 2 else math.factorial(order) * b**order
    if isinstance(mech, Duchi):
        c = duchi_atom(mech.epsilon)
        pos = 0.5 + 0.5 * A / c
        return pos * (c - A) ** order + (1.0 - pos) * (-c - A) ** order
    params = _params_of(mech)
    if params is None:
        raise TypeError(f"unsupported mechanism {mech!r}")
    pieces = density_pieces(params, A)
    mean = _moment(pieces, 1, 0.0)
    return _moment(pieces, order, mean)
