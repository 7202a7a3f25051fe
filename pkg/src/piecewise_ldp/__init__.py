"""Piecewise transformation mechanisms for numerical data under local differential privacy."""

from .core import (DomainBounds, ParameterError, PresetName, PrivacyBudget, PttFamily, PttParams,
                   RangeError, ValidationReport, compose_budgets, derive_ptt_params,
                   eta_upper_bound, optimal_eta, preset_params, rescale_from_unit,
                   rescale_to_unit, validate_params)
from .mechanisms import (AnalysisOnlyError, AuditReport, Duchi, Laplace, NoisyTuples, Ptt,
                         duchi_perturb, laplace_perturb, ldp_ratio_audit, multidim_perturb,
                         ptt_density, ptt_perturb)
from .rng import RandomSource

__version__ = "0.1.0"
