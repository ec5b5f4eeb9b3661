"""Kruskal's algorithm, its coupling with the Erdős–Rényi graph process,
threshold snapshots of the MST, and supporting bounds."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import GraphError, InvalidParameter
from .seeds import trial_seed
from .graphs import (
    SpanningSubgraph,
    WeightedCompleteGraph,
    edge_endpoints,
    edge_uniforms,
    endpoints_array,
    num_edges,
)
from .trees import TreeView, hop_distances, wdiam


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path compression and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.count = size

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        self.count -= 1
        return True

    def connected(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)


def _kruskal_prefix(n: int, order: np.ndarray, u: np.ndarray, v: np.ndarray) -> tuple[list[int], int]:
    """Run Kruskal over ``order`` until a spanning tree appears.

    Returns the accepted positions (into ``order``) and the number of
    processed positions.
    """
    uf = UnionFind(n + 1)
    accepted = []
    uu = u.tolist()
    vv = v.tolist()
    for pos in range(len(uu)):
        if uf.union(uu[pos], vv[pos]):
            accepted.append(pos)
            if len(accepted) == n - 1:
                return accepted, pos + 1
    return accepted, len(uu)


def mst_edges(graph: WeightedCompleteGraph) -> np.ndarray:
    """MST edge indices in Kruskal acceptance order (unique under (weight, index))."""
    n = graph.n
    if n < 2:
        return np.empty(0, dtype=np.int64)
    w = graph.weights
    N = graph.num_edges
    k = min(N, int(2 * n * math.log(n)) + 2 * n)
    while True:
        if k >= N:
            cand = np.argsort(w, kind="stable")
        else:
            tau = np.partition(w, k - 1)[k - 1]
            cand = np.flatnonzero(w <= tau)
            cand = cand[np.argsort(w[cand], kind="stable")]
        u, v = endpoints_array(cand)
        accepted, _ = _kruskal_prefix(n, cand, u, v)
        if len(accepted) == n - 1:
            # every MST edge is no heavier than tau once the light edges span
            return cand[accepted]
        k *= 4


def mst(graph: WeightedCompleteGraph) -> SpanningSubgraph:
    return SpanningSubgraph(graph.n, frozenset(mst_edges(graph).tolist()))


def induced_mst_edges(graph: WeightedCompleteGraph, vertices: Iterable[int]) -> list[int]:
    """MST of the complete graph induced on ``vertices`` (Kruskal on all pairs)."""
    vs = sorted(set(vertices))
    if len(vs) < 2:
        return []
    pos = {v: i for i, v in enumerate(vs)}
    uf = UnionFind(len(vs))
    out = []
    for e in graph.induced_sorted_edges(vs):
        a, b = edge_endpoints(e)
        if uf.union(pos[a], pos[b]):
            out.append(e)
            if len(out) == len(vs) - 1:
                break
    return out


@dataclass
class KruskalTrace:
    """Sorted edge order plus the accept/reject decision at every step.

    Step ``i`` (1-based) has processed ``sorted_edges[:i]``; the forest
    ``F_i`` is the accepted subset and ``G_i`` is the whole prefix.
    """

    graph: WeightedCompleteGraph
    sorted_edges: np.ndarray
    accepted: np.ndarray

    @property
    def N(self) -> int:
        return len(self.sorted_edges)

    @property
    def n(self) -> int:
        return self.graph.n

    def forest_edges(self, i: int | None = None) -> np.ndarray:
        i = self.N if i is None else i
        return self.sorted_edges[:i][self.accepted[:i]]

    def components(self, i: int) -> list[list[int]]:
        """Vertex sets of ``F_i`` (equivalently of ``G_i``), each sorted, ordered by smallest vertex."""
        return components_of(self.n, self.forest_edges(i))

    def m(self, p: float) -> int:
        """Number of edges of weight at most ``p``, i.e. the step at which ``F_i = F(n, p)``."""
        return int(np.searchsorted(self.graph.weights[self.sorted_edges], p, side="right"))

    def mst_edges(self) -> np.ndarray:
        return self.forest_edges()

    def check(self) -> list[str]:
        """Invariant audit: final forest spans with n-1 edges, and forest
        and prefix graph share their components at every step."""
        problems = []
        n = self.n
        if int(self.accepted.sum()) != max(n - 1, 0):
            problems.append(f"accepted {int(self.accepted.sum())} edges, expected {n - 1}")
        uf_forest = UnionFind(n + 1)
        uf_prefix = UnionFind(n + 1)
        u, v = endpoints_array(self.sorted_edges)
        for i, (a, b, acc) in enumerate(zip(u.tolist(), v.tolist(), self.accepted.tolist()), start=1):
            joined = uf_prefix.union(a, b)
            if acc:
                if not uf_forest.union(a, b):
                    problems.append(f"step {i}: accepted edge closes a cycle")
            if joined != bool(acc):
                problems.append(f"step {i}: acceptance {acc} but prefix merge {joined}")
            if uf_forest.count != uf_prefix.count:
                problems.append(f"step {i}: component counts differ")
        return problems


def kruskal_trace(graph: WeightedCompleteGraph) -> KruskalTrace:
    order = graph.sorted_edges()
    u, v = endpoints_array(order)
    accepted_pos, _ = _kruskal_prefix(graph.n, order, u, v)
    accepted = np.zeros(len(order), dtype=bool)
    accepted[accepted_pos] = True
    return KruskalTrace(graph, order, accepted)


def components_of(n: int, edges: Iterable[int]) -> list[list[int]]:
    uf = UnionFind(n + 1)
    for e in np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges).tolist():
        a, b = edge_endpoints(int(e))
        uf.union(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(1, n + 1):
        groups.setdefault(uf.find(x), []).append(x)
    return sorted(groups.values(), key=lambda c: c[0])


@dataclass
class ThresholdSnapshot:
    p: float
    m_p: int
    components: list[list[int]]
    t_max: list[int]
    runner_up_size: int
    W_n: float
    L_np: int
    t_max_edges: list[int]

    def mst_upper_bound(self) -> float:
        """Right-hand side ``p(|t_max| - 1) + 2 W_n L_np`` of the diameter bound."""
        return self.p * (len(self.t_max) - 1) + 2.0 * self.W_n * self.L_np

    def to_dict(self, with_components: bool = False) -> dict:
        d = asdict(self)
        if not with_components:
            d.pop("components")
            d.pop("t_max_edges")
            d["t_max"] = len(self.t_max)
        return d


def snapshot(graph: WeightedCompleteGraph, p: float, mst_edge_list=None) -> ThresholdSnapshot:
    """Threshold statistics of ``F(n, p)``, the MST restricted to edges of weight <= p."""
    if p < 0:
        raise InvalidParameter(f"threshold must be non-negative, got {p}")
    n = graph.n
    tree = np.asarray(mst_edges(graph) if mst_edge_list is None else mst_edge_list, dtype=np.int64)
    w = graph.weights
    light = tree[w[tree] <= p]
    comps = components_of(n, light)
    t_max = min(comps, key=lambda c: (-len(c), c[0]))
    sizes = sorted((len(c) for c in comps), reverse=True)
    runner_up = sizes[1] if len(sizes) > 1 else 0
    W_n = float(w[tree].max()) if len(tree) else 0.0
    # hop distance to t_max inside the MST = longest path meeting t_max in one (end) vertex
    adj: dict[int, list[int]] = {x: [] for x in range(1, n + 1)}
    for e in tree.tolist():
        a, b = edge_endpoints(e)
        adj[a].append(b)
        adj[b].append(a)
    dist = hop_distances(adj, t_max)
    in_t = set(t_max)
    t_edges = [e for e in light.tolist() if edge_endpoints(e)[0] in in_t]
    return ThresholdSnapshot(
        p=float(p),
        m_p=int(np.count_nonzero(w <= p)),
        components=comps,
        t_max=t_max,
        runner_up_size=runner_up,
        W_n=W_n,
        L_np=max(dist.values()),
        t_max_edges=sorted(t_edges),
    )


def snapshot_at(trace: KruskalTrace, p: float) -> ThresholdSnapshot:
    return snapshot(trace.graph, p, trace.mst_edges())


def critical_p(n: int) -> float:
    """Threshold ``1/n + 1/n^(11/10)`` used for the diameter bound."""
    return 1.0 / n + n ** (-1.1)


def alpha(c: float, tol: float = 1e-12) -> float:
    """Largest root of ``exp(-c x) = 1 - x`` (survival probability of a Poisson(c) branching process)."""
    if c <= 0:
        raise InvalidParameter(f"alpha needs c > 0, got {c}")
    if c <= 1:
        return 0.0

    def g(x):
        return math.expm1(-c * x) + x

    # g is convex with g(0) = 0, negative on (0, alpha) and positive after
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class ReducedMSTReport:
    lhs: float
    rhs_general: float
    rhs_subtree_case: float | None
    subtree_case: bool
    holds: bool


_SLACK = 1e-12


def check_reduced_mst_bound(
    graph: WeightedCompleteGraph, tree_edges: Iterable[int], reduced_weights: Mapping[int, float]
) -> ReducedMSTReport:
    """Evaluate both forms of the reduced-weight MST diameter inequality.

    ``reduced_weights`` maps edges of the subtree ``T`` to lowered weights;
    every other edge keeps its weight.
    """
    tree_edges = sorted(set(int(e) for e in tree_edges))
    if not tree_edges:
        raise GraphError("T must have at least one edge")
    TreeView(graph, tree_edges)  # raises unless T is a tree
    tset = set(tree_edges)
    w_star = graph.weights.copy()
    for e, x in reduced_weights.items():
        e = int(e)
        if e not in tset:
            raise InvalidParameter(f"edge {edge_endpoints(e)} is not in T; only T's weights may change")
        if x > graph.weights[e]:
            raise InvalidParameter(f"weight of {edge_endpoints(e)} raised from {graph.weights[e]} to {x}")
        w_star[e] = x
    g_star = WeightedCompleteGraph(graph.n, w_star, graph.seed, graph.distribution)
    mst_star = mst_edges(g_star)
    lhs = wdiam(TreeView(g_star, mst_star.tolist()))
    base = wdiam(TreeView(graph, mst_edges(graph).tolist()))
    wT = float(w_star[tree_edges].sum())
    n_vertices = len(tree_edges) + 1
    rhs_general = wT + n_vertices * base
    subtree = tset <= set(mst_star.tolist())
    rhs_sub = wT + 2.0 * base if subtree else None
    holds = lhs <= rhs_general + _SLACK * (1 + rhs_general)
    if subtree:
        holds = holds and lhs <= rhs_sub + _SLACK * (1 + rhs_sub)
    return ReducedMSTReport(lhs, rhs_general, rhs_sub, subtree, holds)


def connectivity_probability_bound(n: int, p: float) -> float:
    """Upper bound ``exp(n exp(-np/2)) - 1`` on P(G(n, p) is disconnected)."""
    if n < 1 or not 0 <= p <= 1:
        raise InvalidParameter(f"need n >= 1 and 0 <= p <= 1, got n={n}, p={p}")
    return math.expm1(n * math.exp(-n * p / 2.0))


def gnp_connected(n: int, p: float, seed: int) -> bool:
    """Whether ``G(n, p)`` realised from the edge uniforms of ``seed`` is connected."""
    idx = np.flatnonzero(edge_uniforms(seed, np.arange(num_edges(n))) <= p)
    u, v = endpoints_array(idx)
    uf = UnionFind(n + 1)
    for a, b in zip(u.tolist(), v.tolist()):
        uf.union(a, b)
        if uf.count == 2:  # slot 0 is never used
            return True
    return uf.count == 2 or n == 1


def disconnection_frequency(n: int, p: float, trials: int, seed: int) -> float:
    misses = sum(not gnp_connected(n, p, trial_seed(seed, t)) for t in range(trials))
    return misses / trials if trials else 0.0
