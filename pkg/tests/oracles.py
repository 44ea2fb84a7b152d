"""Independent closed-form oracles used by several test modules."""
from math import comb


def one_step_kernel(state, vertex):
    """Exact one-step law of (degree increment, weight increment) for ``vertex``.

    Returns ``{"stay": P, 0: P, 1: P, ..., N-1: P}`` where integer keys are the
    degree increments accompanying a weight increment of one.  Built from
    binomial counts, not from the sampler.
    """
    params = state.params
    N, p, q, r = params.N, params.p, params.q, params.r
    n = state.n + 1  # total N-clique weight before the step
    V = state.vertex_count
    w = state.weight[vertex]
    d = state.degree[vertex]
    others = V - 1 - d  # non-neighbours of the vertex
    alpha = (1 - p) * q + (N - 1) / N * p * r
    beta = (N - 1) * (1 - r) + N * (1 - p) * (1 - q) / p
    c_new = comb(V, N - 1)  # uniform (N-1)-subsets joining a new vertex
    c_old = comb(V, N)  # uniform N-subsets of old vertices

    law = {"stay": 1 - (w / n * alpha + p / V * beta)}
    law[0] = (1 - p) * (q * w / n + (1 - q) * comb(d, N - 1) / c_old)
    law[1] = (p * (r * (N - 1) * w / (N * n) + (1 - r) * comb(d, N - 2) / c_new)
              + (1 - p) * (1 - q) * comb(d, N - 2) * others / c_old)
    for m in range(2, N - 1):
        law[m] = (p * (1 - r) * comb(d, N - 1 - m) * comb(others, m - 1) / c_new
                  + (1 - p) * (1 - q) * comb(d, N - 1 - m) * comb(others, m) / c_old)
    law[N - 1] = (p * (1 - r) * comb(others, N - 2) / c_new
                  + (1 - p) * (1 - q) * comb(others, N - 1) / c_old)
    return law


def tracked_outcome(state, vertex, participants):
    """Outcome class of ``vertex`` for a drawn interaction (see :func:`one_step_kernel`)."""
    if vertex not in participants:
        return "stay"
    nbrs = state.adjacency[vertex]
    return sum(1 for u in participants if u != vertex and u not in nbrs)
