"""
Simulate the graph and compare with the limits
==============================================

Grow a graph for 10^5 interactions and look at the vertex fractions by
weight and by degree next to their limits.
"""

import sys

from ncgraph import ModelParams, derive_constants
from ncgraph import limits, simulator, stats

steps = int(sys.argv[1]) if len(sys.argv) > 1 else 100_000

params = ModelParams(N=4, p=0.5, q=0.5, r=0.5)
state = simulator.initial_state(params, seed=1)
snaps = simulator.run(state, steps, [steps // 100, steps // 10, steps])
print("invariants:", simulator.check_invariants(state) or "ok")

c = derive_constants(params)
table = limits.xdw_table(c, params.N, 60)
emp = stats.empirical_ratios(snaps[-1])

print(" w  simulated  limit")
for w in range(1, 6):
    print(f"{w:>2}  {emp.xw.get(w, 0):.5f}    {table.xw[w - 1]:.5f}")

print(" d  simulated  limit")
for d in range(3, 8):
    print(f"{d:>2}  {emp.ud.get(d, 0):.5f}    {limits.u_d(c, params.N, d)[0]:.5f}")

# V_n / n settles at p
for n, drift in stats.vn_drift(snaps, params.p):
    print(f"n={n:>7}  |V_n/n - p| = {drift:.5f}")

report = stats.compare(emp, table, params, W_cut=50, D_cut=30)
print("TV weights", report.tv_weights, "TV degrees", report.tv_degrees)
print("fitted exponent", report.fitted_exponent, "theory", report.theoretical_exponent)
