"""Step-by-step simulation of the N-interactions random graph.

The graph starts from a single K_N.  At every step N vertices interact: all
missing edges among them are drawn and the weights of the participating
vertices, of their N-clique and of each of its N (N-1)-subcliques grow by one.
The participants are chosen by one of four branches:

===================  =========  ==============================================
branch               prob.      participants
===================  =========  ==============================================
NEW_VERTEX_WEIGHTED  p r        new vertex + weight-proportional (N-1)-clique
NEW_VERTEX_UNIFORM   p (1-r)    new vertex + uniform (N-1)-subset of vertices
OLD_WEIGHTED         (1-p) q    weight-proportional N-clique
OLD_UNIFORM          (1-p)(1-q) uniform N-subset of vertices
===================  =========  ==============================================

Randomness comes from :class:`random.Random` (CPython's MT19937) seeded with
the run seed.  Each step consumes, in this order: one ``random()`` for the
p-branch, one ``random()`` for the r/q-branch, then the selection draws
(one ``randrange`` for a weighted clique, ``random.sample`` for a uniform
subset).  Both variates are consumed even when p = 1.
"""
from __future__ import annotations

import enum
import hashlib
import json
import random
from array import array
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

from .params import DomainError, ModelParams, ValidationTier, validate

GENERATOR_NAME = "python-random-MT19937"


class Branch(enum.Enum):
    NEW_VERTEX_WEIGHTED = "new_vertex_weighted"
    NEW_VERTEX_UNIFORM = "new_vertex_uniform"
    OLD_WEIGHTED = "old_weighted"
    OLD_UNIFORM = "old_uniform"

    @property
    def adds_vertex(self) -> bool:
        return self in (Branch.NEW_VERTEX_WEIGHTED, Branch.NEW_VERTEX_UNIFORM)


class EmptyRegistryError(RuntimeError):
    pass


class CliqueRegistry:
    """Cliques of a fixed size with integer weights.

    ``sample_array`` holds ``weight(c)`` copies of every clique id ``c``, so a
    uniform index into it is an exact weight-proportional draw.
    """

    def __init__(self, size: int):
        self.size = size
        self.by_key: dict[tuple, int] = {}
        self.members: list[tuple] = []
        self.weights: list[int] = []
        self.sample_array = array("q")

    def __len__(self):
        return len(self.members)

    @property
    def total_weight(self) -> int:
        return len(self.sample_array)

    def increment(self, key: tuple) -> int:
        """Add one unit of weight to the clique ``key`` (a sorted id tuple)."""
        cid = self.by_key.get(key)
        if cid is None:
            cid = len(self.members)
            self.by_key[key] = cid
            self.members.append(key)
            self.weights.append(1)
        else:
            self.weights[cid] += 1
        self.sample_array.append(cid)
        return cid

    def weight_of(self, key: tuple) -> int:
        cid = self.by_key.get(tuple(sorted(key)))
        return 0 if cid is None else self.weights[cid]


@dataclass
class InteractionRecord:
    step: int
    new_vertex: Optional[int]
    participants: frozenset
    branch: Branch
    edges_added: int


@dataclass
class Snapshot:
    """Counting statistics X(n,d,w), X(n,w), U(n,d) and V_n after step ``n``."""

    n: int
    V_n: int
    xdw: dict
    xw: dict
    ud: dict


@dataclass
class GraphState:
    params: ModelParams
    seed: int
    rng: random.Random
    n: int = 0
    weight: list = field(default_factory=list)
    degree: list = field(default_factory=list)
    adjacency: list = field(default_factory=list)
    nclique_registry: CliqueRegistry = None
    n1clique_registry: CliqueRegistry = None
    # m -> Counter of m-clique weights, 2 <= m <= N-2; only with track_all_cliques
    small_cliques: Optional[dict] = None

    @property
    def vertex_count(self) -> int:
        return len(self.weight)

    @property
    def edges(self) -> set:
        return {(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v}


def initial_state(params: ModelParams, seed: int, track_all_cliques: bool = False) -> GraphState:
    """A single K_N with every vertex and sub-clique at weight one."""
    problems = validate(params, ValidationTier.SIMULABLE)
    if problems:
        raise DomainError(f"invalid model parameters {params}: violates {', '.join(problems)}")
    N = params.N
    state = GraphState(params=params, seed=seed, rng=random.Random(seed))
    state.weight = [1] * N
    state.degree = [N - 1] * N
    state.adjacency = [set(range(N)) - {v} for v in range(N)]
    state.nclique_registry = CliqueRegistry(N)
    state.n1clique_registry = CliqueRegistry(N - 1)
    key = tuple(range(N))
    state.nclique_registry.increment(key)
    for i in range(N):
        state.n1clique_registry.increment(key[:i] + key[i + 1:])
    if track_all_cliques:
        state.small_cliques = {m: Counter(combinations(key, m)) for m in range(2, N - 1)}
    return state


def sample_weighted_clique(registry: CliqueRegistry, rng: random.Random) -> int:
    if not registry.sample_array:
        raise EmptyRegistryError(f"cannot sample from an empty {registry.size}-clique registry")
    return registry.sample_array[rng.randrange(len(registry.sample_array))]


def sample_uniform_subset(vertex_count: int, k: int, rng: random.Random) -> list:
    """Uniform k-subset of ``range(vertex_count)``.

    ``random.sample`` rejects duplicate draws when k is small compared to the
    population, which is exactly uniform over subsets.
    """
    if k > vertex_count:
        raise ValueError(f"cannot choose {k} distinct vertices out of {vertex_count}")
    return rng.sample(range(vertex_count), k)


def draw_interaction(state: GraphState, rng: Optional[random.Random] = None):
    """Choose the branch and participants of the next step without applying it.

    Returns ``(branch, participants)`` where participants is a tuple of N
    vertex ids; a new vertex gets the id ``state.vertex_count``.
    """
    rng = state.rng if rng is None else rng
    params = state.params
    N = params.N
    V = len(state.weight)
    u_new = rng.random()
    u_sub = rng.random()
    if u_new < params.p:
        if u_sub < params.r:
            cid = sample_weighted_clique(state.n1clique_registry, rng)
            old = state.n1clique_registry.members[cid]
            branch = Branch.NEW_VERTEX_WEIGHTED
        else:
            old = sample_uniform_subset(V, N - 1, rng)
            branch = Branch.NEW_VERTEX_UNIFORM
        return branch, (*old, V)
    if u_sub < params.q:
        cid = sample_weighted_clique(state.nclique_registry, rng)
        return Branch.OLD_WEIGHTED, state.nclique_registry.members[cid]
    if V < N:
        raise RuntimeError(f"uniform {N}-subset requested with only {V} vertices")
    return Branch.OLD_UNIFORM, tuple(sample_uniform_subset(V, N, rng))


def apply_interaction(state: GraphState, branch: Branch, participants: Sequence[int]) -> InteractionRecord:
    weight, degree, adjacency = state.weight, state.degree, state.adjacency
    new_vertex = None
    if branch.adds_vertex:
        new_vertex = len(weight)
        weight.append(0)
        degree.append(0)
        adjacency.append(set())
    key = tuple(sorted(participants))
    edges_added = 0
    for i, a in enumerate(key):
        nbrs = adjacency[a]
        for b in key[i + 1:]:
            if b not in nbrs:
                nbrs.add(b)
                adjacency[b].add(a)
                degree[a] += 1
                degree[b] += 1
                edges_added += 1
        weight[a] += 1
    state.nclique_registry.increment(key)
    n1 = state.n1clique_registry
    for i in range(len(key)):
        n1.increment(key[:i] + key[i + 1:])
    if state.small_cliques is not None:
        for m, counter in state.small_cliques.items():
            counter.update(combinations(key, m))
    state.n += 1
    return InteractionRecord(state.n, new_vertex, frozenset(key), branch, edges_added)


def step(state: GraphState) -> InteractionRecord:
    branch, participants = draw_interaction(state)
    return apply_interaction(state, branch, participants)


def snapshot(state: GraphState) -> Snapshot:
    xdw = Counter(zip(state.degree, state.weight))
    xw = Counter(state.weight)
    ud = Counter(state.degree)
    return Snapshot(state.n, len(state.weight), dict(xdw), dict(xw), dict(ud))


def run(state: GraphState, steps: int, snapshot_at: Sequence[int] = ()) -> list:
    """Advance ``steps`` steps, snapshotting when the step counter hits ``snapshot_at``.

    ``snapshot_at`` holds absolute step counts between ``state.n`` and
    ``state.n + steps``.
    """
    start, stop = state.n, state.n + steps
    targets = sorted(set(snapshot_at))
    if targets and (targets[0] < start or targets[-1] > stop):
        raise ValueError(f"snapshot indices must lie in [{start}, {stop}]")
    snapshots = []
    for target in targets:
        while state.n < target:
            step(state)
        snapshots.append(snapshot(state))
    while state.n < stop:
        step(state)
    return snapshots


def check_invariants(state: GraphState) -> list[str]:
    """Names of the structural invariants that fail for ``state`` (empty if none)."""
    N, n = state.params.N, state.n
    V = len(state.weight)
    failed = []
    if not N <= V <= N + n:
        failed.append("N <= V_n <= N + n")
    if sum(state.weight) != N * (n + 1):
        failed.append("sum of vertex weights = N(n+1)")
    if state.nclique_registry.total_weight != n + 1 or sum(state.nclique_registry.weights) != n + 1:
        failed.append("N-clique registry weight = n+1")
    if state.n1clique_registry.total_weight != N * (n + 1) or sum(state.n1clique_registry.weights) != N * (n + 1):
        failed.append("(N-1)-clique registry weight = N(n+1)")
    for v in range(V):
        d, w = state.degree[v], state.weight[v]
        if d != len(state.adjacency[v]):
            failed.append(f"degree = |adjacency| at vertex {v}")
            break
        if not (N - 1 <= d <= (N - 1) * w and 1 <= w <= n + 1):
            failed.append(f"degree/weight bounds at vertex {v}")
            break
    for registry in (state.nclique_registry, state.n1clique_registry):
        for members in registry.members:
            if any(b not in state.adjacency[a] for a, b in combinations(members, 2)):
                failed.append(f"{registry.size}-clique {members} not complete")
                break
    return failed


def state_digest(state: GraphState) -> str:
    h = hashlib.sha256()
    h.update(json.dumps([state.params.as_dict(), state.seed, state.n]).encode())
    h.update(array("q", state.weight).tobytes())
    h.update(array("q", state.degree).tobytes())
    for nbrs in state.adjacency:
        h.update(array("q", sorted(nbrs)).tobytes())
        h.update(b"|")
    for registry in (state.nclique_registry, state.n1clique_registry):
        h.update(registry.sample_array.tobytes())
    return h.hexdigest()


def write_edge_list(state: GraphState, path) -> None:
    """Write ``u v`` lines (0-based ids) plus a ``<path>.json`` sidecar."""
    from pathlib import Path

    path = Path(path)
    with open(path, "w") as fh:
        for u, nbrs in enumerate(state.adjacency):
            for v in sorted(nbrs):
                if u < v:
                    fh.write(f"{u} {v}\n")
    meta = {**state.params.as_dict(), "seed": state.seed, "steps": state.n, "generator": GENERATOR_NAME}
    path.with_name(path.name + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
