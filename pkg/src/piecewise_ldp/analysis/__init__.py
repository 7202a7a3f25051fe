"""Analytic moments, comparisons, optimal eta and lower bounds."""

from .comparison import (ComparisonKind, FeasibilityReport, comparison_polynomial,
                         noisy_variance_gaps, scan_eta_feasibility, theorem7_gap,
                         worst_case_gap_vs_duchi)
from .crossover import crossover_gap, crossover_root
from .curves import CurvePoint, feasibility_points, write_curve_csv, write_feasibility_csv
from .lower_bound import (CONSTANTS, LowerBoundConstants, LowerBoundPoint, h2_quadratic,
                          lower_bound_curves, psi1, psi2)
from .moments import (Moments, central_moment, density_pieces, moments_by_quadrature,
                      ptt_variance, variance_analytic, worst_case_variance)
from .optimize import (ETA_FLOOR, MinVariance, OptimalEta, eta_cubic, fixed_q_variance,
                       min_variance_numeric, normalized_variance, optimal_eta_closed_form)

__all__ = [
    "ComparisonKind", "FeasibilityReport", "comparison_polynomial", "noisy_variance_gaps",
    "scan_eta_feasibility", "theorem7_gap", "worst_case_gap_vs_duchi",
    "crossover_gap", "crossover_root",
    "CurvePoint", "feasibility_points", "write_curve_csv", "write_feasibility_csv",
    "CONSTANTS", "LowerBoundConstants", "LowerBoundPoint", "h2_quadratic",
    "lower_bound_curves", "psi1", "psi2",
    "Moments", "central_moment", "density_pieces", "moments_by_quadrature",
    "ptt_variance", "variance_analytic", "worst_case_variance",
    "ETA_FLOOR", "MinVariance", "OptimalEta", "eta_cubic", "fixed_q_variance",
    "min_variance_numeric", "normalized_variance", "optimal_eta_closed_form",
]
