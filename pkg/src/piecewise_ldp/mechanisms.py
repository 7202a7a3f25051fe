"""Samplers and exact densities for Laplace, Duchi and PTT mechanisms.

All samplers are vectorized over the input values and draw from an explicit
:class:`~piecewise_ldp.rng.RandomSource`; the number of uniforms consumed per
report is fixed, so outputs are reproducible bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .core import ParameterError, PttFamily, PttParams, as_epsilon, validate_params
from .rng import RandomSource

__all__ = [
    "AnalysisOnlyError",
    "Laplace",
    "Duchi",
    "Ptt",
    "MechanismKind",
    "NoisyTuples",
    "AuditReport",
    "laplace_from_uniform",
    "laplace_perturb",
    "duchi_atom",
    "duchi_perturb",
    "ptt_from_uniforms",
    "ptt_perturb",
    "ptt_density",
    "ldp_ratio_audit",
    "multidim_perturb",
]

_TINY = np.finfo(float).tiny


class AnalysisOnlyError(ParameterError):
    """A sampler was handed an analysis-only (non-normalized) parameter bundle."""


def _unit_array(A):
    arr = np.asarray(A, dtype=float)
    if np.any(~((arr >= -1.0) & (arr <= 1.0))):
        bad = arr.reshape(-1)[np.flatnonzero(~((arr >= -1.0) & (arr <= 1.0)).reshape(-1))[0]]
        raise ParameterError(f"input {bad!r} is outside [-1, 1]")
    return arr


def _out(arr, scalar_in):
    return float(arr) if scalar_in else arr


# -- Laplace -----------------------------------------------------------------

def laplace_from_uniform(A, epsilon, u):
    """``A`` plus Laplace(0, 2/eps) noise obtained from the uniforms ``u`` by inverse CDF."""
    b = 2.0 / as_epsilon(epsilon)
    u = np.asarray(u, dtype=float)
    lower = u < 0.5
    noise = np.where(
        lower,
        b * np.log(np.maximum(2.0 * u, _TINY)),
        -b * np.log(np.maximum(2.0 * (1.0 - u), _TINY)),
    )
    return np.asarray(A, dtype=float) + noise


def laplace_perturb(A, epsilon, rng: RandomSource):
    """Report ``A + Lap(2/eps)``; one uniform per value."""
    arr = _unit_array(A)
    u = rng.uniform(arr.shape)
    return _out(laplace_from_uniform(arr, epsilon, u), arr.ndim == 0)


def laplace_density(y, A, epsilon):
    eps = as_epsilon(epsilon)
    return 0.25 * eps * np.exp(-0.5 * eps * np.abs(np.asarray(y, float) - np.asarray(A, float)))


# -- Duchi -------------------------------------------------------------------

def duchi_atom(epsilon) -> float:
    """Magnitude ``(e^eps + 1)/(e^eps - 1)`` of the two Duchi outputs."""
    return 1.0 + 2.0 / math.expm1(as_epsilon(epsilon))


def duchi_prob_positive(A, epsilon):
    return 0.5 + 0.5 * np.asarray(A, dtype=float) / duchi_atom(epsilon)


def duchi_perturb(A, epsilon, rng: RandomSource, atom: Optional[float] = None):
    """Two-point randomized response on ``+-atom``; one uniform per value."""
    arr = _unit_array(A)
    atom = duchi_atom(epsilon) if atom is None else atom
    u = rng.uniform(arr.shape)
    out = np.where(u < duchi_prob_positive(arr, epsilon), atom, -atom)
    return _out(out, arr.ndim == 0)


def duchi_pmf(y, A, epsilon, atom: Optional[float] = None):
    atom = duchi_atom(epsilon) if atom is None else atom
    y = np.asarray(y, dtype=float)
    pos = duchi_prob_positive(A, epsilon)
    return np.where(y == atom, pos, np.where(y == -atom, 1.0 - pos, 0.0))


# -- PTT ---------------------------------------------------------------------

def _require_sampleable(params: PttParams):
    if params.analysis_only:
        raise AnalysisOnlyError("analysis-only PTT parameters cannot be sampled from")


def _tent_offset(w, h):
    """Inverse CDF of ``h + 1 - x`` on [0, 1], normalized; ``w`` in [0, 1].

    Root of ``x^2/2 - (h+1) x + w (h + 1/2) = 0`` in the cancellation-free form.
    """
    c = 2.0 * w * (h + 0.5)
    return c / ((h + 1.0) + np.sqrt((h + 1.0) ** 2 - c))


def ptt_from_uniforms(A, params: PttParams, u_choice, u_pos):
    """Map two uniform streams to PTT reports.

    ``u_choice < q`` selects the band ``[kA - a, kA + a]``; otherwise ``u_pos``
    is spread over the complement ``[-B, kA - a] U [kA + a, B]`` by length, so a
    zero-length side (``A = +-1``) is never chosen.
    """
    A = np.asarray(A, dtype=float)
    u_choice = np.asarray(u_choice, dtype=float)
    u_pos = np.asarray(u_pos, dtype=float)
    k, a, B = params.k, params.a, params.B
    center = k * A
    if params.family is PttFamily.TYPE_I:
        band = center - a + 2.0 * a * u_pos
    else:
        # pedestal p/e^eps plus a tent of height p(1 - e^-eps); ratio h
        h = 1.0 / math.expm1(params.epsilon)
        side = np.sign(u_pos - 0.5)
        band = center + side * a * _tent_offset(np.abs(2.0 * u_pos - 1.0), h)
    left_len = k * (A + 1.0)
    s = 2.0 * k * u_pos
    outside = np.where(s < left_len, -B + s, center + a + (s - left_len))
    out = np.where(u_choice < params.q, band, outside)
    return np.clip(out, -B, B)


def ptt_perturb(A, params: PttParams, rng: RandomSource):
    """Draw PTT reports for ``A``; two uniforms per value."""
    _require_sampleable(params)
    arr = _unit_array(A)
    u = rng.uniform((2,) + arr.shape)
    return _out(ptt_from_uniforms(arr, params, u[0], u[1]), arr.ndim == 0)


def ptt_density(y, A, params: PttParams):
    """Exact PTT density at ``y`` given input ``A`` (analysis-only bundles allowed)."""
    y = np.asarray(y, dtype=float)
    A = np.asarray(A, dtype=float)
    dist = np.abs(y - params.k * A)
    base = params.out_density
    if params.family is PttFamily.TYPE_I:
        band = np.full(np.broadcast(y, A).shape, params.p)
    else:
        slope = params.p * (-math.expm1(-params.epsilon)) / params.a
        band = np.maximum(params.p - slope * dist, base)
    out = np.where(dist <= params.a, band, base)
    out = np.where(np.abs(y) <= params.B, out, 0.0)
    return float(out) if out.ndim == 0 else out


# -- mechanism descriptors ---------------------------------------------------

@dataclass(frozen=True)
class Laplace:
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_epsilon(self.epsilon))

    name = "laplace"

    def perturb(self, A, rng: RandomSource):
        return laplace_perturb(A, self.epsilon, rng)

    def density(self, y, A):
        return laplace_density(y, A, self.epsilon)

    def output_bound(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Duchi:
    epsilon: float

    def __post_init__(self):
        object.__setattr__(self, "epsilon", as_epsilon(self.epsilon))
        # cached so that outputs compare equal to ``self.atom`` exactly
        object.__setattr__(self, "atom", duchi_atom(self.epsilon))

    name = "duchi"

    def perturb(self, A, rng: RandomSource):
        return duchi_perturb(A, self.epsilon, rng, atom=self.atom)

    def density(self, y, A):
        return duchi_pmf(y, A, self.epsilon, atom=self.atom)

    def output_bound(self) -> float:
        return self.atom


@dataclass(frozen=True)
class Ptt:
    params: PttParams

    def __post_init__(self):
        _require_sampleable(self.params)
        report = validate_params(self.params)
        if not report.ok:
            raise ParameterError(f"invalid PTT parameters: {', '.join(report.failed())}")

    @property
    def epsilon(self) -> float:
        return self.params.epsilon

    @property
    def name(self) -> str:
        return "ptt-" + self.params.family.value

    def perturb(self, A, rng: RandomSource):
        return ptt_perturb(A, self.params, rng)

    def density(self, y, A):
        return ptt_density(y, A, self.params)

    def output_bound(self) -> float:
        return self.params.B


MechanismKind = Union[Laplace, Duchi, Ptt]


# -- LDP audit ---------------------------------------------------------------

@dataclass
class AuditReport:
    """Largest density ratio found, with the inputs and output that attain it."""

    max_ratio: float
    exp_epsilon: float
    witness: tuple  # (A_i, A_j, y)

    @property
    def satisfied(self) -> bool:
        return self.max_ratio <= self.exp_epsilon * (1.0 + 1e-9)

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "exp_epsilon": self.exp_epsilon,
                "witness": list(self.witness), "satisfied": self.satisfied}


def _default_outputs(mech, inputs):
    if isinstance(mech, Duchi):
        return np.array([-mech.atom, mech.atom])
    if isinstance(mech, Laplace):
        return np.linspace(-10.0, 10.0, 2001)
    prm = mech.params if isinstance(mech, Ptt) else mech
    centers = prm.k * np.asarray(inputs)
    return np.unique(np.concatenate([np.linspace(-prm.B, prm.B, 801), centers]))


def ldp_ratio_audit(mech, input_grid: Sequence[float], output_grid: Optional[Sequence[float]] = None) -> AuditReport:
    """Maximize ``density(y | A_i) / density(y | A_j)`` over the grids.

    ``mech`` may be a mechanism descriptor or a bare :class:`PttParams`
    (analysis-only bundles allowed, since only the density is used).  Pairs
    where either density vanishes are skipped.
    """
    inputs = np.asarray(input_grid, dtype=float)
    if inputs.size == 0:
        raise ValueError("input grid is empty")
    outputs = _default_outputs(mech, inputs) if output_grid is None else np.asarray(output_grid, dtype=float)
    if outputs.size == 0:
        raise ValueError("output grid is empty")
    if isinstance(mech, PttParams):
        dens = ptt_density(outputs[None, :], inputs[:, None], mech)
        eps = mech.epsilon
    else:
        dens = np.asarray(mech.density(outputs[None, :], inputs[:, None]), dtype=float)
        eps = mech.epsilon
    pos = dens > 0
    hi = np.where(pos, dens, -np.inf).max(axis=0)
    lo = np.where(pos, dens, np.inf).min(axis=0)
    usable = np.isfinite(hi) & np.isfinite(lo)
    if not np.any(usable):
        return AuditReport(math.nan, math.exp(eps), (math.nan, math.nan, math.nan))
    ratio = np.where(usable, hi / np.where(usable, lo, 1.0), -np.inf)
    col = int(np.argmax(ratio))
    i = int(np.argmax(np.where(pos[:, col], dens[:, col], -np.inf)))
    j = int(np.argmin(np.where(pos[:, col], dens[:, col], np.inf)))
    return AuditReport(float(ratio[col]), math.exp(eps), (float(inputs[i]), float(inputs[j]), float(outputs[col])))


# -- multidimensional wrapper ------------------------------------------------

@dataclass
class NoisyTuples:
    """Sparse reports: row ``i`` is zero except at ``chosen_index[i]`` (1-based)."""

    values: np.ndarray
    chosen_index: np.ndarray

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __len__(self):
        return self.values.shape[0]


def multidim_perturb(tuples, mech: MechanismKind, rng: RandomSource, chosen_index=None) -> NoisyTuples:
    """Perturb one uniformly chosen coordinate per tuple and scale it by ``d``.

    ``tuples`` is ``(d,)`` or ``(n, d)``.  ``chosen_index`` (1-based) overrides
    the random coordinate choice.
    """
    arr = np.asarray(tuples, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] == 0 or arr.shape[0] == 0:
        raise ValueError("multidim_perturb needs a non-empty (n, d) array of tuples")
    n, d = arr.shape
    if chosen_index is None:
        j = rng.integers(0, d, size=n)
    else:
        j = np.broadcast_to(np.asarray(chosen_index, dtype=np.int64), (n,)) - 1
        if np.any((j < 0) | (j >= d)):
            raise ValueError(f"chosen_index must lie in [1, {d}]")
    rows = np.arange(n)
    noisy = np.asarray(mech.perturb(arr[rows, j], rng), dtype=float)
    out = np.zeros((n, d))
    out[rows, j] = d * noisy
    return NoisyTuples(out, j + 1)
