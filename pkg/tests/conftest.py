import time

import pytest

from ncgraph import simulator
from ncgraph.params import ModelParams

BASE = ModelParams(4, 0.5, 0.5, 0.5)
LONG_SEEDS = (1, 2, 3, 4, 5)
LONG_SNAPSHOTS = (10 ** 4, 10 ** 5, 10 ** 6)


def registry_totals(state):
    return {
        "n": state.n,
        "nclique": state.nclique_registry.total_weight,
        "nclique_sum": sum(state.nclique_registry.weights),
        "n1clique": state.n1clique_registry.total_weight,
        "n1clique_sum": sum(state.n1clique_registry.weights),
        "vertex_weight": sum(state.weight),
    }


@pytest.fixture(scope="session")
def long_runs():
    """Five replicas of (N=4, p=q=r=0.5) run to 10^6 steps.

    Maps seed -> {"snapshots": [...], "totals": [...], "seconds": wall time,
    "state": final state or None}.
    """
    runs = {}
    for seed in LONG_SEEDS:
        started = time.perf_counter()
        state = simulator.initial_state(BASE, seed)
        snaps, totals = [], []
        for target in LONG_SNAPSHOTS:
            snaps += simulator.run(state, target - state.n, [target])
            totals.append(registry_totals(state))
        # only the first replica keeps its graph, for the full invariant audit
        runs[seed] = {"snapshots": snaps, "totals": totals, "seconds": time.perf_counter() - started,
                      "state": state if seed == LONG_SEEDS[0] else None}
    return runs
