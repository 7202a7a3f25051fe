"""
Where each mechanism wins
=========================

Per-input variance at a few budgets, the budget at which Duchi and Laplace
trade places, and the width ratio eta that minimizes the type-I variance.
"""

import math

from piecewise_ldp import Duchi, Laplace, Ptt, derive_ptt_params
from piecewise_ldp.analysis import (crossover_root, min_variance_numeric, optimal_eta_closed_form,
                                    variance_analytic)

inputs = (-1.0, -0.5, 0.0, 0.5, 1.0)

for eps in (0.5, 1.0, math.log(3.0), 3.0):
    mechs = [Laplace(eps), Duchi(eps), Ptt(derive_ptt_params(eps, 1.9, "type-i")),
             Ptt(derive_ptt_params(eps, 2.0, "type-ii"))]
    print(f"\neps = {eps:.4f}")
    print("mechanism   " + "".join(f"A={a:+.1f}   " for a in inputs))
    for m in mechs:
        print(f"{m.name:<11} " + "".join(f"{variance_analytic(m, a):8.3f} " for a in inputs))

# Duchi beats Laplace at A = 0 only below this budget
print(f"\nDuchi/Laplace crossover at A=0: eps = {crossover_root(0.0):.5f}")
print(f"at A=1 there is none: {crossover_root(1.0)}")

# closed-form eta from the fixed-q cubic vs the normalized family's minimizer
print("\n   eps    eta0 (cubic)   eta* (A=1)   eta* (A=0)")
for eps in (0.01, 0.1, 1.0, 3.0):
    eta0 = optimal_eta_closed_form(eps).eta0
    e1 = min_variance_numeric(eps, 1.0, "type-i").eta_star
    e0 = min_variance_numeric(eps, 0.0, "type-i").eta_star
    print(f"{eps:6.2f}   {eta0:10.4f}   {e1:10.4f}   {e0:10.4f}")
