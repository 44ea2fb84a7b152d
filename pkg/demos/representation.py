"""
Degree as a sum of independent steps
====================================

Given the limiting weight W = w, the degree is N-1 plus independent jumps
xi_2 .. xi_w, each 0, 1 or N-1.  Sampling that representation reproduces
the limit table.
"""

import numpy as np

from ncgraph import ModelParams, derive_constants
from ncgraph import limits

params = ModelParams(N=4, p=0.5, q=0.5, r=0.5)
c = derive_constants(params)
table = limits.xdw_table(c, params.N, 30)

# exact, by convolving the jump laws
rows = limits.representation_joint(c, params.N, 30)
print("DP vs table:", max(np.abs(rows[w - 1] - table.row(w)).max() for w in range(1, 31)))

# Monte Carlo
sample = limits.sample_representation(c, params.N, np.random.default_rng(1), 200_000)
emp = sample.normalized()
cells = {(d, w) for d, w, _ in table.cells()} | {k for k in emp if k[1] <= 30}
tv = 0.5 * sum(abs(emp.get(k, 0.0) - table.x(*k)) for k in cells if k[1] <= 30)
print(f"TV on w <= 30: {tv:.4f}  (W capped at {sample.W_cap}, lost mass {sample.truncated_mass:.1e})")

# Local CLT: around its mean, row w looks Gaussian.
w = 1000
big = limits.xdw_table(c, params.N, w)
m = limits.sw_moments(c, params.N, w)
d = np.arange(int(m.mean) - 3, int(m.mean) + 4)
print(np.c_[d, big.row(w)[d - 3], limits.clt_approx_xdw(c, params.N, d, w)])
