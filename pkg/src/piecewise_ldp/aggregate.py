"""Mean estimation from noisy reports and the error-scaling experiment harness."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Sequence, TextIO

import numpy as np
from scipy import stats

from .analysis.curves import fmt
from .core import ParameterError
from .mechanisms import MechanismKind, NoisyTuples, multidim_perturb
from .rng import RandomSource

__all__ = [
    "estimate_mean",
    "estimate_means_multidim",
    "ValueDistribution",
    "ExperimentConfig",
    "ErrorRow",
    "ErrorTable",
    "SlopeFit",
    "trial_deviations",
    "run_scaling_experiment",
    "fit_error_slope",
]


def estimate_mean(noisy) -> float:
    """Sample mean of the reports."""
    arr = np.asarray(noisy, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValueError("cannot estimate a mean from zero reports")
    return float(arr.mean())


def estimate_means_multidim(tuples, d: int) -> np.ndarray:
    """Coordinate-wise mean of sparse, ``d``-scaled reports.

    ``tuples`` is a :class:`NoisyTuples` or an ``(n, d)`` array.
    """
    values = tuples.values if isinstance(tuples, NoisyTuples) else np.asarray(tuples, dtype=float)
    if values.ndim != 2 or values.shape[1] != d:
        raise ValueError(f"expected reports of dimension {d}, got shape {values.shape}")
    if values.shape[0] == 0:
        raise ValueError("cannot estimate means from zero reports")
    return values.mean(axis=0)


@dataclass(frozen=True)
class ValueDistribution:
    """How true values are drawn: ``uniform`` on [-1, 1], ``constant`` c, or ``two-point`` +-c."""

    kind: str = "uniform"
    c: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "constant", "two-point"):
            raise ParameterError(f"unknown value distribution {self.kind!r}")
        if not -1.0 <= self.c <= 1.0:
            raise ParameterError(f"distribution constant {self.c} is outside [-1, 1]")

    @classmethod
    def parse(cls, text: str) -> "ValueDistribution":
        """Parse ``uniform``, ``constant:0.3`` or ``two-point:0.5``."""
        kind, _, arg = text.partition(":")
        return cls(kind.strip(), float(arg) if arg else 0.0)

    def sample(self, shape, rng: RandomSource) -> np.ndarray:
        if self.kind == "constant":
            return np.full(shape, self.c)
        u = rng.uniform(shape)
        if self.kind == "uniform":
            return 2.0 * u - 1.0
        return np.where(u < 0.5, -self.c, self.c)

    def __str__(self):
        return self.kind if self.kind == "uniform" else f"{self.kind}:{self.c!r}"


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: Sequence[int]
    mechanism: MechanismKind
    trials: int = 50
    d: int = 1
    beta: float = 0.05
    distribution: ValueDistribution = field(default_factory=ValueDistribution)
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise ParameterError("every n must be a positive integer")
        if self.trials < 1:
            raise ParameterError("trials must be at least 1")
        if self.d < 1:
            raise ParameterError("d must be at least 1")
        if not 0.0 < self.beta < 1.0:
            raise ParameterError("beta must lie strictly between 0 and 1")

    @property
    def epsilon(self) -> float:
        return self.mechanism.epsilon


@dataclass(frozen=True)
class ErrorRow:
    n: int
    d: int
    epsilon: float
    mechanism: str
    mean_abs_err: float
    max_err: float
    quantile_err: float
    beta: float
    trials: int
    m_bound: float


_HEADER = ["n", "d", "epsilon", "mechanism", "mean_abs_err", "max_err",
           "quantile_err", "beta", "trials", "m_bound"]


@dataclass
class ErrorTable:
    rows: list = field(default_factory=list)

    def to_csv(self, stream: TextIO) -> None:
        w = csv.writer(stream, lineterminator="\n")
        w.writerow(_HEADER)
        for r in self.rows:
            w.writerow([r.n, r.d, fmt(r.epsilon), r.mechanism, fmt(r.mean_abs_err),
                        fmt(r.max_err), fmt(r.quantile_err), fmt(r.beta), r.trials,
                        fmt(r.m_bound)])

    def __eq__(self, other):
        return isinstance(other, ErrorTable) and self.rows == other.rows


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float

    def to_json(self) -> str:
        return json.dumps({"slope": self.slope, "intercept": self.intercept,
                           "r_squared": self.r_squared})


def _one_trial(config: ExperimentConfig, n: int, rng: RandomSource):
    """Signed estimation error(s) of one simulated collection round."""
    d = config.d
    if d == 1:
        truth = config.distribution.sample(n, rng)
        est = estimate_mean(config.mechanism.perturb(truth, rng))
        return est - float(truth.mean())
    truth = config.distribution.sample((n, d), rng)
    reports = multidim_perturb(truth, config.mechanism, rng)
    return estimate_means_multidim(reports, d) - truth.mean(axis=0)


def trial_deviations(config: ExperimentConfig, n_index: int) -> np.ndarray:
    """Signed errors of every trial at ``config.n_values[n_index]``.

    Trial ``j`` draws from child stream ``(n_index, j)`` of the master seed.
    Shape ``(trials,)`` for ``d == 1`` and ``(trials, d)`` otherwise.
    """
    n = config.n_values[n_index]
    root = RandomSource(config.master_seed)
    return np.array([_one_trial(config, n, root.child(n_index, j)) for j in range(config.trials)])


def run_scaling_experiment(config: ExperimentConfig) -> ErrorTable:
    """Absolute estimation error statistics for each n.

    For ``d > 1`` the error of a trial is the largest coordinate error.
    """
    table = ErrorTable()
    bound = config.mechanism.output_bound()
    m_bound = config.d * bound + 1.0
    for i, n in enumerate(config.n_values):
        dev = trial_deviations(config, i)
        err = np.abs(dev) if dev.ndim == 1 else np.abs(dev).max(axis=1)
        table.rows.append(ErrorRow(
            n=n, d=config.d, epsilon=config.epsilon, mechanism=config.mechanism.name,
            mean_abs_err=float(err.mean()), max_err=float(err.max()),
            quantile_err=float(np.quantile(err, 1.0 - config.beta)),
            beta=config.beta, trials=config.trials, m_bound=m_bound,
        ))
    return table


def fit_error_slope(table: ErrorTable) -> SlopeFit:
    """Least-squares slope of ``log(mean_abs_err)`` against ``log(n)``."""
    ns = np.array([r.n for r in table.rows], dtype=float)
    errs = np.array([r.mean_abs_err for r in table.rows], dtype=float)
    if np.unique(ns).size < 3:
        raise ValueError("slope fit needs at least 3 distinct n values")
    if np.any(errs <= 0):
        raise ValueError("slope fit needs strictly positive errors")
    fit = stats.linregress(np.log(ns), np.log(errs))
    r2 = min(max(fit.rvalue**2, 0.0), 1.0)
    return SlopeFit(float(fit.slope), float(fit.intercept), float(r2))
