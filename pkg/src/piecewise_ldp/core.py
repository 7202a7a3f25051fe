"""Domain types, budget accounting, rescaling and PTT parameter derivation.

A piecewise transformation (PTT) instance is fixed by a privacy budget
``epsilon`` and the shape ratio ``eta = B / a``.  Everything else (band slope
``k``, band half-width ``a``, support half-width ``B``, peak density ``p``
and in-band mass ``q``) follows from unbiasedness plus the requirement that
the density integrates to one.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Union

import numpy as np

__all__ = [
    "ParameterError",
    "RangeError",
    "PrivacyBudget",
    "DomainBounds",
    "PttFamily",
    "PresetName",
    "PttParams",
    "ValidationReport",
    "as_epsilon",
    "check_unit",
    "rescale_to_unit",
    "rescale_from_unit",
    "compose_budgets",
    "eta_upper_bound",
    "derive_ptt_params",
    "preset_params",
    "optimal_eta",
    "validate_params",
]


class ParameterError(ValueError):
    """Raised when a mechanism parameter lies outside its admissible range."""


class RangeError(ValueError):
    """Raised when an input value lies outside its declared domain."""


@dataclass(frozen=True)
class PrivacyBudget:
    """A pure epsilon-LDP budget."""

    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not (math.isfinite(eps) and eps > 0):
            raise ParameterError(f"epsilon must be positive and finite, got {self.epsilon!r}")
        object.__setattr__(self, "epsilon", eps)

    def __float__(self) -> float:
        return self.epsilon


EpsilonLike = Union[float, PrivacyBudget]


def as_epsilon(epsilon: EpsilonLike) -> float:
    """Return ``epsilon`` as a validated float."""
    return PrivacyBudget(float(epsilon)).epsilon


def check_unit(value: float, name: str = "value") -> float:
    """Validate that ``value`` lies in [-1, 1]."""
    v = float(value)
    if not (-1.0 <= v <= 1.0):
        raise RangeError(f"{name}={value!r} is outside [-1, 1]")
    return v


@dataclass(frozen=True)
class DomainBounds:
    """Closed interval [lo, hi] of a raw attribute before rescaling."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi)):
            raise ParameterError(f"bounds must be finite, got [{self.lo}, {self.hi}]")
        if not lo < hi:
            raise ParameterError(f"bounds need lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


def rescale_to_unit(u, bounds: DomainBounds):
    """Map ``u`` from ``[bounds.lo, bounds.hi]`` onto [-1, 1].

    Accepts scalars or array-likes; raises :class:`RangeError` naming the first
    offending value if anything is out of range.

    >>> rescale_to_unit(7.5, DomainBounds(0, 10))
    0.5
    """
    lo, hi = bounds.lo, bounds.hi
    arr = np.asarray(u, dtype=float)
    bad = ~((arr >= lo) & (arr <= hi))
    if np.any(bad):
        first = arr.reshape(-1)[np.flatnonzero(bad.reshape(-1))[0]]
        raise RangeError(f"value {first!r} is outside [{lo}, {hi}]")
    width = hi - lo
    out = 2.0 * arr / width - (hi + lo) / width
    out = np.clip(out, -1.0, 1.0)
    return float(out) if out.ndim == 0 else out


def rescale_from_unit(v, bounds: DomainBounds):
    """Inverse of :func:`rescale_to_unit`.

    Values outside [-1, 1] are allowed since noisy reports leave the unit
    interval.
    """
    arr = np.asarray(v, dtype=float)
    out = 0.5 * (arr * (bounds.hi - bounds.lo) + (bounds.hi + bounds.lo))
    return float(out) if out.ndim == 0 else out


def compose_budgets(budgets: Iterable[EpsilonLike]) -> PrivacyBudget:
    """Sequential composition: running each mechanism once costs the sum."""
    eps = [as_epsilon(b) for b in budgets]
    if not eps:
        raise ValueError("compose_budgets needs at least one budget")
    return PrivacyBudget(math.fsum(eps))


class PttFamily(enum.Enum):
    """Band profile of a PTT: constant (type I) or tent-shaped (type II)."""

    TYPE_I = "type-i"
    TYPE_II = "type-ii"

    @classmethod
    def parse(cls, value) -> "PttFamily":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"i": "type-i", "typei": "type-i", "1": "type-i",
                   "ii": "type-ii", "typeii": "type-ii", "2": "type-ii"}
        key = aliases.get(key.replace("-", ""), key)
        try:
            return cls(key)
        except ValueError:
            raise ParameterError(f"unknown PTT family {value!r}; use 'type-i' or 'type-ii'") from None


class PresetName(enum.Enum):
    PM_COMPATIBLE = "pm"
    THEOREM9 = "theorem9"
    OPTIMAL_ETA = "optimal"

    @classmethod
    def parse(cls, value) -> "PresetName":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ParameterError(f"unknown preset {value!r}; use pm, theorem9 or optimal") from None


_JSON_KEYS = ("epsilon", "eta", "k", "a", "B", "p", "q", "family", "analysis_only")


@dataclass(frozen=True)
class PttParams:
    """Fully derived parameter bundle of one PTT instance.

    ``analysis_only`` marks bundles whose density does not integrate to one
    (the fixed-``q`` optimum); samplers refuse them.
    """

    epsilon: float
    eta: float
    k: float
    a: float
    B: float
    p: float
    q: float
    family: PttFamily
    analysis_only: bool = False

    @property
    def expm1_eps(self) -> float:
        return math.expm1(self.epsilon)

    @property
    def out_density(self) -> float:
        """Density level outside the band, ``p / e^eps``."""
        return self.p * math.exp(-self.epsilon)

    def in_band_mass(self) -> float:
        if self.family is PttFamily.TYPE_I:
            return 2.0 * self.a * self.p
        return self.a * self.p * (1.0 + math.exp(-self.epsilon))

    def out_band_mass(self) -> float:
        return 2.0 * self.k * self.out_density

    def band(self, A: float) -> tuple:
        """Return the band ``(L(A), R(A)) = (kA - a, kA + a)``."""
        c = self.k * A
        return c - self.a, c + self.a

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon, "eta": self.eta, "k": self.k, "a": self.a,
            "B": self.B, "p": self.p, "q": self.q,
            "family": self.family.value, "analysis_only": self.analysis_only,
        }

    def to_json(self) -> str:
        """Flat JSON object; reals with 17 significant digits, fixed key order."""
        parts = []
        for key, value in self.to_dict().items():
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, str):
                text = json.dumps(value)
            else:
                text = format(value, ".17g")
            parts.append(f'"{key}": {text}')
        return "{" + ", ".join(parts) + "}"

    @classmethod
    def from_dict(cls, data: Mapping) -> "PttParams":
        missing = [k for k in _JSON_KEYS if k not in data and k != "analysis_only"]
        if missing:
            raise ParameterError(f"params object missing keys: {', '.join(missing)}")
        return cls(
            epsilon=float(data["epsilon"]), eta=float(data["eta"]),
            k=float(data["k"]), a=float(data["a"]), B=float(data["B"]),
            p=float(data["p"]), q=float(data["q"]),
            family=PttFamily.parse(data["family"]),
            analysis_only=bool(data.get("analysis_only", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "PttParams":
        return cls.from_dict(json.loads(text))


def eta_upper_bound(epsilon: EpsilonLike, family) -> float:
    """Largest eta keeping the in-band mass q at or above 1/2."""
    eps = as_epsilon(epsilon)
    family = PttFamily.parse(family)
    if family is PttFamily.TYPE_I:
        return 1.0 + math.exp(eps)
    return 0.5 * (math.exp(eps) + 3.0)


def derive_ptt_params(epsilon: EpsilonLike, eta: float, family) -> PttParams:
    """Derive the normalized, unbiased PTT with shape ratio ``eta``.

    >>> prm = derive_ptt_params(math.log(3), 2.0, "type-i")
    >>> round(prm.q, 12), round(prm.k, 12), round(prm.a, 12), round(prm.p, 12)
    (0.75, 2.0, 2.0, 0.1875)
    """
    eps = as_epsilon(epsilon)
    family = PttFamily.parse(family)
    eta = float(eta)
    hi = eta_upper_bound(eps, family)
    # the upper bound is where q hits exactly 1/2; allow rounding at the edge
    if not (math.isfinite(eta) and eta > 1.0 and eta <= hi * (1 + 1e-15)):
        raise ParameterError(
            f"eta={eta!r} is not admissible for {family.value} at epsilon={eps!r}; "
            f"need 1 < eta <= {hi!r}"
        )
    em1 = math.expm1(eps)
    e = em1 + 1.0
    d = eta - 1.0
    if family is PttFamily.TYPE_I:
        k = (d + e) / em1
        a = k / d
        q = e / (d + e)
        p = q / (2.0 * a)
    else:
        k = (e + 1.0 + 2.0 * d) / em1
        a = k / d
        q = (e + 1.0) / (k * em1)
        p = e / (a * k * em1)
    return PttParams(eps, eta, k, a, k + a, p, q, family)


def optimal_eta(epsilon: EpsilonLike) -> float:
    """Positive root of ``eta^3 - 3 eta^2 - 2 (e^eps - 1)``.

    With ``eta = 1 + y`` the cubic is ``y^3 - 3y - 2 e^eps = 0``, solved by
    ``y = u + 1/u`` with ``u^3 = e^eps + sqrt(e^{2 eps} - 1)``.  The second
    cube-root term is written as ``1/u`` to avoid cancellation at large eps.
    """
    eps = as_epsilon(epsilon)
    e = math.exp(eps)
    root = math.sqrt(math.expm1(eps) * (e + 1.0))
    u = (e + root) ** (1.0 / 3.0)
    return 1.0 + u + 1.0 / u


def preset_params(name, epsilon: EpsilonLike, q_for_optimal: Optional[float] = None) -> PttParams:
    """Named parameter choices.

    ``pm``        type I with ``eta = e^{eps/2} + 1`` (the classic piecewise mechanism)
    ``theorem9``  type I with ``eta = 19/10``
    ``optimal``   ``eta`` from :func:`optimal_eta` with the band scale fixed by
                  the caller's ``q``; this bundle generally fails normalization and
                  is flagged ``analysis_only``
    """
    name = PresetName.parse(name)
    eps = as_epsilon(epsilon)
    if name is PresetName.PM_COMPATIBLE:
        return derive_ptt_params(eps, math.exp(eps / 2.0) + 1.0, PttFamily.TYPE_I)
    if name is PresetName.THEOREM9:
        return derive_ptt_params(eps, 1.9, PttFamily.TYPE_I)
    if q_for_optimal is None:
        raise ValueError("the 'optimal' preset needs q_for_optimal")
    q = float(q_for_optimal)
    if not (0.5 <= q < 1.0):
        raise ParameterError(f"q_for_optimal={q!r} must lie in [1/2, 1)")
    eta0 = optimal_eta(eps)
    em1 = math.expm1(eps)
    k = (em1 + 1.0) / (q * em1)
    a = k / (eta0 - 1.0)
    p = q / (2.0 * a)
    return PttParams(eps, eta0, k, a, k + a, p, q, PttFamily.TYPE_I, analysis_only=True)


@dataclass
class ValidationReport:
    """Outcome of :func:`validate_params`: one ``(name, ok, residual)`` per check."""

    checks: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> list:
        return [name for name, ok, _ in self.checks if not ok]

    def residual(self, name: str) -> float:
        for n, _, r in self.checks:
            if n == name:
                return r
        raise KeyError(name)

    def __str__(self) -> str:
        lines = [f"{'PASS' if ok else 'FAIL'} {name} (residual {res:.3e})" for name, ok, res in self.checks]
        return "\n".join(lines)


def _rel(x: float, y: float) -> float:
    if not (math.isfinite(x) and math.isfinite(y)):
        return math.inf
    return abs(x - y) / max(abs(y), 1e-300)


def validate_params(params: PttParams, rtol: float = 1e-12) -> ValidationReport:
    """Check every invariant of a :class:`PttParams` bundle without raising."""
    rep = ValidationReport()
    add = rep.checks.append
    try:
        eps = params.epsilon
        positive = all(math.isfinite(v) and v > 0 for v in (eps, params.k, params.a, params.B, params.p))
        add(("positive_fields", positive, 0.0))
        add(("B_equals_k_plus_a", _rel(params.B, params.k + params.a) <= rtol, _rel(params.B, params.k + params.a)))
        add(("eta_equals_B_over_a", _rel(params.eta, params.B / params.a) <= rtol, _rel(params.eta, params.B / params.a)))
        k_from_eta = (params.eta - 1.0) * params.a
        add(("k_equals_eta_minus_1_times_a", _rel(params.k, k_from_eta) <= rtol, _rel(params.k, k_from_eta)))
        add(("q_range", 0.5 - 1e-12 <= params.q < 1.0, max(0.0, 0.5 - params.q, params.q - 1.0)))
        em1 = math.expm1(eps)
        e = em1 + 1.0
        if params.family is PttFamily.TYPE_I:
            q_th = e / (params.k * em1)
            p_th = e / (2.0 * params.a * params.k * em1)
            hi = 1.0 + e
        else:
            q_th = (e + 1.0) / (params.k * em1)
            p_th = e / (params.a * params.k * em1)
            hi = 0.5 * (e + 3.0)
        add(("q_unbiased", _rel(params.q, q_th) <= rtol, _rel(params.q, q_th)))
        add(("p_unbiased", _rel(params.p, p_th) <= rtol, _rel(params.p, p_th)))
        in_mass = params.in_band_mass()
        add(("q_is_in_band_mass", _rel(in_mass, params.q) <= rtol, _rel(in_mass, params.q)))
        total = in_mass + params.out_band_mass()
        add(("normalization", abs(total - 1.0) <= rtol, abs(total - 1.0)))
        eta_ok = 1.0 < params.eta <= hi * (1 + 1e-15)
        add(("eta_validity", eta_ok, max(0.0, 1.0 - params.eta, params.eta - hi)))
    except (TypeError, ValueError, ZeroDivisionError, OverflowError) as exc:
        add((f"evaluation_error: {exc}", False, math.inf))
    return rep
