"""
Limit distributions of weight and degree
========================================

Build the joint limit table x[d, w], check that its rows add up to the
weight law, and compare the weight law with its power-law tail.
"""

import numpy as np

from ncgraph import ModelParams, derive_constants
from ncgraph import limits

params = ModelParams(N=4, p=0.5, q=0.5, r=0.5)
c = derive_constants(params)
print(c)

# The joint table.  Row w runs over degrees N-1 .. (N-1)w.
table = limits.xdw_table(c, params.N, 200)
for w in (1, 2, 3):
    print(w, np.round(table.row(w), 6))

# Degree 5 never appears with weight 2: a vertex picks up 0, 1 or N-1
# new neighbours per interaction, so N+1 .. 2N-3 are unreachable.
print("x[5,2] =", table.x(5, 2))

# Row sums reproduce x_w from its own recurrence.
xw = limits.xw_recurrence(c, 200)
row_sums = np.array([table.row(w).sum() for w in range(1, 201)])
print("max row-sum error:", np.abs(row_sums - xw).max())

# Closed form and power-law tail C w^-(1+1/alpha).
w = np.array([10, 100, 1000, 10000])
closed = limits.xw_closed_form(c, w)
asym = limits.xw_asymptotic(c, w)
for wi, a, b in zip(w, closed, asym):
    print(f"w={wi:>6}  closed={a:.4e}  asymptotic={b:.4e}  ratio={a / b:.4f}")

# The mass beyond W is exactly (alpha W + beta) x_W.
W = 200
print("tail beyond 200:", limits.xw_tail_mass(c, W), "=", 1 - xw.sum())
