"""
How small can the worst case get?
=================================

Compare the closed-form lower bound g1(eps) with the best worst-case
variance the normalized type-I family actually reaches.
"""

import numpy as np

from piecewise_ldp.analysis import CONSTANTS, lower_bound_curves, min_variance_numeric

print(f"theta1 = {CONSTANTS.theta1}, theta2 = {CONSTANTS.theta2:.6f}\n")
print("     eps        g1(eps)   min worst case   ratio   eps^2 * min")
for eps in np.geomspace(1e-3, 5.0, 9):
    g1 = lower_bound_curves(eps, 2.0).g1
    best = min_variance_numeric(eps, 1.0, "type-i").var_star
    print(f"{eps:9.4f}  {g1:12.4f}  {best:14.4f}  {best / g1:6.3f}  {eps * eps * best:10.4f}")

# the last column tends to 16/3 as eps -> 0
