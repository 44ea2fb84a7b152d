"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Tolerances are fixed constants below; statistical checks use fixed seeds.
"""
import json
import math
import random
import shutil
import subprocess
import sys
import time
from collections import Counter

import numpy as np
import pytest

from ncgraph import limits as L, simulator as sim
from ncgraph.params import ModelParams, derive_constants
from conftest import BASE, LONG_SEEDS
from oracles import one_step_kernel, tracked_outcome

PARAM_SETS = [
    ModelParams(3, 0.5, 0.5, 0.5),
    ModelParams(4, 0.5, 0.5, 0.5),
    ModelParams(5, 0.25, 0.75, 0.5),
    ModelParams(3, 0.9, 0.1, 0.9),
    ModelParams(6, 0.5, 0.5, 0.5),
]

C1_TOL, C1_W, C1_SECONDS = 1e-10, 500, 1.0
C2_W, C2_ROW_TOL, C2_ROW_W = 10 ** 4, 1e-12, 60
C3_HAND = {3: 0.0094201, 4: 0.0070651, 6: 0.1318812}
C3_TOL = 1e-6
C4_WINDOW, C4_REL, C4_SECONDS = (10 ** 3, 10 ** 4), 0.02, 1.0
C5_BRUTE_D, C5_TOL, C5_RATIO_D, C5_FINAL = (50, 100), 1e-9, (50, 100, 200), 0.20
C6_DP_W, C6_DP_TOL, C6_COUNT, C6_TV_W, C6_TV, C6_SECONDS = 40, 1e-10, 10 ** 6, 30, 0.01, 30.0
C7_W = (250, 500, 1000, 2000)
C8_VN, C8_XW, C8_UD, C8_BAND, C8_SECONDS = 0.002, 0.01, 0.01, 0.005, 60.0
C9_PREFIX, C9_REPLAYS, C9_SE = 300, 10 ** 5, 3.0


@pytest.fixture
def verdict(capsys):
    def emit(criterion: str, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}")
        assert ok, detail
    return emit


def test_c1_recurrence_matches_closed_form(verdict):
    started = time.perf_counter()
    worst = 0.0
    for params in PARAM_SETS:
        c = derive_constants(params)
        rec = L.xw_recurrence(c, C1_W)
        closed = L.xw_closed_form(c, np.arange(1, C1_W + 1))
        worst = max(worst, float(np.max(np.abs(rec - closed))))
    elapsed = time.perf_counter() - started
    verdict("1", worst <= C1_TOL and elapsed < C1_SECONDS,
            f"max |recurrence - closed form| = {worst:.3e} (tol {C1_TOL}), {elapsed:.3f} s")


def test_c2_normalization(verdict):
    lines, ok = [], True
    for params in PARAM_SETS:
        c = derive_constants(params)
        total = float(np.sum(L.xw_recurrence(c, C2_W)))
        T = L.weight_constant(c) * c.alpha * C2_W ** (-1 / c.alpha)
        table = L.xdw_table(c, params.N, C2_ROW_W)
        xw = L.xw_recurrence(c, C2_ROW_W)
        row_err = max(abs(float(np.sum(table.row(w))) - float(xw[w - 1])) for w in range(1, C2_ROW_W + 1))
        good = 1 - 2 * T <= total <= 1 and row_err <= C2_ROW_TOL
        ok &= good
        lines.append(f"{tuple(params.as_dict().values())}: 1-sum={1 - total:.3e} T={T:.3e} row={row_err:.1e}")
    verdict("2", ok, "; ".join(lines))


def test_c3_zero_band(verdict):
    ok = True
    for N in (4, 5, 6):
        table = L.xdw_table(derive_constants(ModelParams(N, 0.5, 0.5, 0.5)), N, 2)
        ok &= all(table.x(d, 2) == 0.0 for d in range(N + 1, 2 * N - 2))
        ok &= all(table.x(d, 2) > 0 for d in (N - 1, N, 2 * (N - 1)))
    base = L.xdw_table(derive_constants(BASE), 4, 2)
    got = {d: base.x(d, 2) for d in C3_HAND}
    ok &= all(abs(got[d] - v) <= C3_TOL for d, v in C3_HAND.items())
    verdict("3", ok, "band exact zero for N=4,5,6; hand values "
            + ", ".join(f"x_{d},2={got[d]:.7f}" for d in C3_HAND))


def test_c4_weight_exponent(verdict):
    from ncgraph import stats
    started = time.perf_counter()
    lines, ok = [], True
    w = np.arange(C4_WINDOW[0], C4_WINDOW[1] + 1)
    for params in PARAM_SETS:
        c = derive_constants(params)
        slope, _ = stats.fit_power_law_exponent(dict(zip(w.tolist(), L.xw_closed_form(c, w))), *C4_WINDOW)
        target = -(1 + 1 / c.alpha)
        rel = abs(slope / target - 1)
        ok &= rel <= C4_REL
        lines.append(f"{slope:.4f} vs {target:.4f}")
    elapsed = time.perf_counter() - started
    verdict("4", ok and elapsed < C4_SECONDS, "; ".join(lines) + f"; {elapsed:.3f} s")


def test_c5_degree_marginal(verdict):
    c = derive_constants(BASE)
    brute_ok, parts = True, []
    for d in C5_BRUTE_D:
        value, _ = L.u_d(c, 4, d, tail_tol=1e-10)
        W = math.ceil(4 * c.alpha * d / c.alpha2)
        table = L.xdw_table(c, 4, W)
        brute = sum(table.x(d, w) for w in range(1, W + 1))
        brute_ok &= abs(value - brute) <= C5_TOL
        parts.append(f"d={d} |u_d-brute|={abs(value - brute):.1e}")
    ratios = [L.u_d(c, 4, d)[0] / L.u_d_asymptotic(c, d) for d in C5_RATIO_D]
    toward_one = all(abs(b - 1) < abs(a - 1) for a, b in zip(ratios, ratios[1:]))
    final_ok = abs(ratios[-1] - 1) <= C5_FINAL
    parts.append("ratios " + ", ".join(f"{r:.3f}" for r in ratios))
    verdict("5", brute_ok and toward_one and final_ok, "; ".join(parts))


def test_c6_representation(verdict):
    started = time.perf_counter()
    c = derive_constants(BASE)
    table = L.xdw_table(c, 4, C6_DP_W)
    rows = L.representation_joint(c, 4, C6_DP_W)
    dp_err = max(float(np.max(np.abs(rows[w - 1] - table.row(w)))) for w in range(1, C6_DP_W + 1))
    sample = L.sample_representation(c, 4, np.random.default_rng(1), C6_COUNT)
    emp = sample.normalized()
    cells = {(d, w) for d, w, _ in table.cells() if w <= C6_TV_W}
    cells |= {cell for cell in emp if cell[1] <= C6_TV_W}
    tv = 0.5 * sum(abs(emp.get(cell, 0.0) - table.x(*cell)) for cell in cells)
    elapsed = time.perf_counter() - started
    verdict("6", dp_err <= C6_DP_TOL and tv <= C6_TV and elapsed < C6_SECONDS,
            f"DP max error {dp_err:.1e}, MC TV {tv:.4f} (W_cap {sample.W_cap}), {elapsed:.1f} s")


def test_c7_local_clt(verdict):
    c = derive_constants(BASE)
    table = L.xdw_table(c, 4, max(C7_W))
    errs = []
    for w in C7_W:
        d = np.arange(3, 3 * w + 1)
        exact = table.row(w)
        approx = L.clt_approx_xdw(c, 4, d, w)
        scale = math.sqrt(2 * math.pi * c.alpha1 * c.alpha2 * w) / (c.alpha * L.xw_closed_form(c, w))
        errs.append(float(np.max(np.abs(exact - approx))) * scale)
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    bound = 2 * errs[1] * math.sqrt(500 / 2000)
    verdict("7", decreasing and errs[-1] <= bound,
            "errors " + ", ".join(f"w={w}: {e:.4f}" for w, e in zip(C7_W, errs)) + f"; bound {bound:.4f}")


@pytest.mark.slow
def test_c8_simulation_vs_theory(long_runs, verdict):
    run = long_runs[LONG_SEEDS[0]]
    c = derive_constants(BASE)
    registry_ok = all(t["nclique"] == t["nclique_sum"] == t["n"] + 1
                      and t["n1clique"] == t["n1clique_sum"] == 4 * (t["n"] + 1) for t in run["totals"])
    final = run["snapshots"][-1]
    vn = abs(final.V_n / final.n - 0.5)
    xw = L.xw_recurrence(c, 5)
    xw_err = max(abs(final.xw.get(w, 0) / final.V_n - xw[w - 1]) for w in range(1, 6))
    ud_err = max(abs(final.ud.get(d, 0) / final.V_n - L.u_d(c, 4, d)[0]) for d in range(3, 8))
    band = final.xdw.get((5, 2), 0) / final.V_n
    audit = sim.check_invariants(run["state"])
    ok = (registry_ok and not audit and vn <= C8_VN and xw_err <= C8_XW and ud_err <= C8_UD
          and band <= C8_BAND and run["seconds"] <= C8_SECONDS)
    verdict("8", ok, f"n={final.n} |V/n-.5|={vn:.5f} x_w err {xw_err:.4f} u_d err {ud_err:.4f} "
            f"band {band:.4f} invariants {'ok' if registry_ok and not audit else audit} "
            f"run {run['seconds']:.1f} s")


def test_c9_one_step_kernel(verdict):
    state = sim.initial_state(BASE, 20240)
    sim.run(state, C9_PREFIX)
    vertex = max(range(state.vertex_count), key=lambda v: state.weight[v])
    law = one_step_kernel(state, vertex)
    rng = random.Random(777)
    counts = Counter(tracked_outcome(state, vertex, sim.draw_interaction(state, rng)[1])
                     for _ in range(C9_REPLAYS))
    zs = {}
    for outcome, prob in law.items():
        se = math.sqrt(prob * (1 - prob) / C9_REPLAYS)
        zs[outcome] = (counts.get(outcome, 0) / C9_REPLAYS - prob) / se if se > 0 else 0.0
    ok = len(law) == 5 and all(abs(z) <= C9_SE for z in zs.values()) and set(counts) <= set(law)
    verdict("9", ok, f"vertex {vertex} (w={state.weight[vertex]}, d={state.degree[vertex]}); z-scores "
            + ", ".join(f"{k}: {z:+.2f}" for k, z in zs.items()))


def test_c10_determinism(tmp_path, verdict):
    out = tmp_path / "run"
    common = ["--out", str(out), "--steps", "1500", "--seed", "11", "--seed", "12", "--wmax", "40", "--dcut", "15"]
    trees = []
    for _ in range(2):
        shutil.rmtree(out, ignore_errors=True)
        for command in ("simulate", "limits", "compare"):
            res = subprocess.run([sys.executable, "-m", "ncgraph", command, *common], capture_output=True)
            assert res.returncode == 0, res.stderr
        trees.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    json.loads(trees[0]["manifest.json"])
    verdict("10", trees[0] == trees[1], f"{len(trees[0])} files byte-identical across two invocations")
