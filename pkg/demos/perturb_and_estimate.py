"""
Private mean of a bounded attribute
===================================

Ages in [18, 90] are mapped onto [-1, 1], perturbed on the "client" side
with three mechanisms at the same budget, and averaged on the "server".
"""

import numpy as np

from piecewise_ldp import (DomainBounds, Duchi, Laplace, Ptt, RandomSource, preset_params,
                           rescale_from_unit, rescale_to_unit)
from piecewise_ldp.aggregate import estimate_mean

rng = np.random.default_rng(1)
ages = np.clip(rng.normal(41.0, 12.0, size=200_000), 18, 90)
bounds = DomainBounds(18.0, 90.0)
unit = rescale_to_unit(ages, bounds)

eps = 1.0
mechanisms = [Laplace(eps), Duchi(eps), Ptt(preset_params("pm", eps)), Ptt(preset_params("theorem9", eps))]

print(f"true mean age        {ages.mean():8.3f}")
for i, mech in enumerate(mechanisms):
    reports = mech.perturb(unit, RandomSource(7).child(i))
    est = rescale_from_unit(estimate_mean(reports), bounds)
    print(f"{mech.name:<20} {est:8.3f}   (reports span {reports.min():+.2f} .. {reports.max():+.2f})")
