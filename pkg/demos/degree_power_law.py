"""
Degree marginal and its power law
=================================

u_d sums the joint table over weights.  The sum is cut where a Hoeffding
bound certifies the remainder, so a single degree costs O(d) work.
"""

import numpy as np

from ncgraph import ModelParams, derive_constants
from ncgraph import limits, stats

params = ModelParams(N=4, p=0.5, q=0.5, r=0.5)
c = derive_constants(params)

for d in (3, 6, 9, 50, 100):
    value, bound = limits.u_d(c, params.N, d)
    print(f"u_{d} = {value:.6e}  (omitted mass <= {bound:.1e})")

# The ratio to the asymptotic formula creeps toward one.  The mean of S_w
# carries a log w shift, so the approach is slow for these parameters.
for d in (50, 200, 800, 3200):
    value, _ = limits.u_d(c, params.N, d)
    print(d, value / limits.u_d_asymptotic(c, d))

# Fitting the weight tail on [10^3, 10^4] recovers -(1 + 1/alpha).
w = np.arange(1000, 10001)
dist = dict(zip(w.tolist(), limits.xw_closed_form(c, w)))
slope, se = stats.fit_power_law_exponent(dist, 1000, 10000)
print("fitted slope", slope, "theory", -(1 + 1 / c.alpha))
