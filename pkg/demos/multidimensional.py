"""
Several attributes, one budget
==============================

Each user reports one randomly chosen coordinate of a 5-dimensional tuple,
scaled by d, so the total budget is spent once.
"""

import numpy as np

from piecewise_ldp import Ptt, RandomSource, derive_ptt_params, multidim_perturb
from piecewise_ldp.aggregate import estimate_means_multidim

d, n = 5, 400_000
truth = np.array([0.7, -0.3, 0.0, 0.25, -0.9])
rows = np.clip(truth + 0.1 * np.random.default_rng(3).standard_normal((n, d)), -1, 1)

mech = Ptt(derive_ptt_params(1.0, 1.9, "type-i"))
reports = multidim_perturb(rows, mech, RandomSource(11))

print("chosen coordinate counts:", np.bincount(reports.chosen_index - 1, minlength=d))
print("true means     ", np.round(rows.mean(axis=0), 4))
print("estimated means", np.round(estimate_means_multidim(reports, d), 4))
