"""Exact ``cost(G, H)`` for tiny graphs by search over subgraph states.

A state is the bitmask of the current edge set (bit ``e`` for linear edge
index ``e``).  From a state ``H``, every vertex set ``S`` with ``|S| >= 2``
and ``H[S]`` connected gives a transition to ``Φ(H, S)`` of weight
``w(H[S])``.  The cost is the smallest achievable maximum transition weight
on a path to the MST state.
"""

from __future__ import annotations

import heapq
from collections import deque
from functools import lru_cache

import numpy as np

from .errors import BudgetExceeded, GraphError, InvalidParameter
from .graphs import SpanningSubgraph, WeightedCompleteGraph, edge_endpoints, edge_index, num_edges
from .kruskal import induced_mst_edges, mst_edges

MAX_N = 6
FORCE_MAX_N = 7


@lru_cache(maxsize=None)
def _component_table(n: int) -> np.ndarray:
    """Number of connected components of ``([n], mask)`` for every edge mask."""
    N = num_edges(n)
    ends = [edge_endpoints(e) for e in range(N)]
    table = np.empty(1 << N, dtype=np.int8)
    # label[mask] is built from mask without its top bit: one union per mask
    labels = np.empty((1 << N, n + 1), dtype=np.int8)
    labels[0] = np.arange(n + 1)
    table[0] = n
    for mask in range(1, 1 << N):
        top = mask.bit_length() - 1
        prev = mask ^ (1 << top)
        lab = labels[prev]
        u, v = ends[top]
        a, b = lab[u], lab[v]
        if a == b:
            labels[mask] = lab
            table[mask] = table[prev]
        else:
            new = lab.copy()
            new[new == b] = a
            labels[mask] = new
            table[mask] = table[prev] - 1
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _subset_masks(n: int) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Edge masks induced by every vertex subset of size >= 2, with sizes and vertex lists."""
    masks, sizes, subsets = [], [], []
    for s in range(1 << n):
        vs = [v + 1 for v in range(n) if s >> v & 1]
        if len(vs) < 2:
            continue
        m = 0
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                m |= 1 << edge_index(a, b)
        masks.append(m)
        sizes.append(len(vs))
        subsets.append(tuple(vs))
    return np.asarray(masks, dtype=np.int64), np.asarray(sizes, dtype=np.int64), tuple(subsets)


class StateSpace:
    """Transition tables for one weighted graph."""

    def __init__(self, graph: WeightedCompleteGraph, force: bool = False):
        n = graph.n
        limit = FORCE_MAX_N if force else MAX_N
        if n > limit:
            raise BudgetExceeded(
                f"n={n} exceeds the oracle budget (n <= {MAX_N}, or {FORCE_MAX_N} with force;"
                f" n=7 needs about {(1 << 21) * 9 // 2**20} MiB of tables)"
            )
        if n < 2:
            raise InvalidParameter("oracle needs n >= 2")
        self.graph = graph
        self.n = n
        self.cc = _component_table(n)
        self.ind, self.sizes, self.subsets = _subset_masks(n)
        w = graph.weights
        wsum = np.zeros(1, dtype=np.float64)
        for b in range(num_edges(n)):
            wsum = np.concatenate((wsum, wsum + w[b]))
        self.wsum = wsum
        mst_masks = []
        for vs in self.subsets:
            mm = 0
            for e in induced_mst_edges(graph, vs):
                mm |= 1 << e
            mst_masks.append(mm)
        self.mst_of = np.asarray(mst_masks, dtype=np.int64)
        self.target = 0
        for e in mst_edges(graph).tolist():
            self.target |= 1 << e
        self.need = n - self.sizes + 1

    def transitions(self, h: int) -> tuple[np.ndarray, np.ndarray]:
        """Successor masks and step weights of every non-trivial transition from ``h``."""
        sub = h & self.ind
        ok = self.cc[sub] == self.need
        succ = (h & ~self.ind[ok]) | self.mst_of[ok]
        wt = self.wsum[sub[ok]]
        return succ, wt


def _mask_of(H: SpanningSubgraph) -> int:
    m = 0
    for e in H.edges:
        m |= 1 << e
    return m


def _prepare(graph, H0, force):
    if H0.n != graph.n:
        raise InvalidParameter("graph and subgraph sizes differ")
    space = StateSpace(graph, force)
    if not H0.is_connected():
        raise GraphError("H0 must be connected")
    return space, _mask_of(H0)


def exact_cost(graph: WeightedCompleteGraph, H0: SpanningSubgraph, force: bool = False) -> float:
    """Best-first bottleneck search: always expand the cheapest frontier state."""
    space, start = _prepare(graph, H0, force)
    best = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        c, h = heapq.heappop(heap)
        if h in done:
            continue
        if h == space.target:
            return c
        done.add(h)
        succ, wt = space.transitions(h)
        for s, x in zip(succ.tolist(), wt.tolist()):
            if s == h or s in done:
                continue
            nc = c if c > x else x
            if nc < best.get(s, float("inf")):
                best[s] = nc
                heapq.heappush(heap, (nc, s))
    raise GraphError("MST state unreachable")  # cannot happen: S = [n] always works


def reachable_under(graph: WeightedCompleteGraph, H0: SpanningSubgraph, rho: float, force: bool = False) -> bool:
    """Whether the MST state is reachable with every step weight at most ``rho``."""
    space, start = _prepare(graph, H0, force)
    return _reachable(space, start, rho)


def _reachable(space: StateSpace, start: int, rho: float) -> bool:
    seen = {start}
    queue = deque([start])
    while queue:
        h = queue.popleft()
        if h == space.target:
            return True
        succ, wt = space.transitions(h)
        for s in succ[wt <= rho].tolist():
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return False


def threshold_cost(graph: WeightedCompleteGraph, H0: SpanningSubgraph, force: bool = False) -> float:
    """Cost by bisection over candidate values with :func:`reachable_under` (cross-check)."""
    space, start = _prepare(graph, H0, force)
    if start == space.target:
        return 0.0
    # the cost is one of the subset weights, so search the sorted candidates
    cand = np.unique(space.wsum)
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _reachable(space, start, float(cand[mid])):
            hi = mid
        else:
            lo = mid + 1
    return float(cand[lo])
