"""The eating construction: grow a region on which ``H`` agrees with the MST.

A region ``U`` with ``H[U] = MST(G[U])`` absorbs one new vertex ``t`` at a
time.  When ``t`` has a single neighbour in ``U`` the absorption walks the
tree paths from ``t`` to every vertex of ``U``, nearest to the attachment
vertex first (``target_order="nearest"``) or by increasing label
(``target_order="label"``).
With several neighbours, ``U`` is split into tree-Voronoi cells around
them, each cell is absorbed as if ``t`` were a leaf, and the cycles left
behind are removed one at a time, shortest MST path first.

Every public function has a reference route that applies each step with
:class:`LocalState` and a fast route (``fast=True``) that uses the compiled
kernels in :mod:`._fast`; both produce the same sets, weights and final
subgraph.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import _fast
from .errors import GraphError, InvalidParameter
from .graphs import SpanningSubgraph, WeightedCompleteGraph, edge_endpoints, edge_index
from .kruskal import induced_mst_edges
from .search import LocalState, SequenceTrace, TraceRecorder
from .trees import wdiam_of_edges


@dataclass
class VoronoiPartition:
    sources: list[int]
    cell: dict[int, int]
    dist: dict[int, float]

    @property
    def k(self) -> int:
        return len(self.sources)

    def cells(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in self.sources]
        for v, i in self.cell.items():
            out[i].append(v)
        return [sorted(c) for c in out]


def voronoi_partition(state: LocalState, U: Iterable[int], sources: Sequence[int]) -> VoronoiPartition:
    """Nearest-source partition of ``U`` by weighted distance in ``H[U]``.

    Distance ties go to the source with the smaller index in ``sources``.
    """
    uset = set(U)
    sources = list(sources)
    if not sources or any(s not in uset for s in sources):
        raise InvalidParameter("sources must be a non-empty subset of U")
    dist: dict[int, float] = {}
    cell: dict[int, int] = {}
    heap = [(0.0, i, s) for i, s in enumerate(sources)]
    heapq.heapify(heap)
    while heap:
        d, i, v = heapq.heappop(heap)
        if v in cell:
            continue
        cell[v] = i
        dist[v] = d
        for y in state.adj[v]:
            if y in uset and y not in cell:
                heapq.heappush(heap, (d + state.w(v, y), i, y))
    if len(cell) != len(uset):
        raise GraphError("H[U] is not connected")
    return VoronoiPartition(sources, cell, dist)


def bfs_increment_order(H: SpanningSubgraph, V0: Iterable[int]) -> list[int]:
    """Vertices outside ``V0`` in BFS order from ``V0`` (smaller labels first)."""
    V0 = sorted(set(V0))
    if not V0:
        raise InvalidParameter("V0 must be non-empty")
    adj = H.adjacency
    seen = set(V0)
    queue = deque(V0)
    out = []
    while queue:
        x = queue.popleft()
        for y in sorted(adj.get(x, ())):
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    if len(seen) != H.n:
        raise GraphError("H is not connected")
    return out


def induced_mst_wdiam(graph: WeightedCompleteGraph, vertices: Iterable[int]) -> float:
    vs = sorted(set(vertices))
    return wdiam_of_edges(graph, induced_mst_edges(graph, vs), vs)


TARGET_ORDERS = ("nearest", "label")


class _Engine:
    """Shared machinery: one mutable state plus one recorder."""

    def __init__(
        self, graph: WeightedCompleteGraph, state: LocalState, rec: TraceRecorder, fast: bool, order: str = "nearest"
    ):
        if order not in TARGET_ORDERS:
            raise InvalidParameter(f"target order must be one of {TARGET_ORDERS}, got {order!r}")
        self.graph = graph
        self.state = state
        self.rec = rec
        self.fast = fast
        self.order = order

    # -- leaf absorption ----------------------------------------------------

    def targets(self, U: set[int], t: int) -> list[int]:
        if self.order == "label":
            return sorted(U)
        a = next(y for y in self.state.adj[t] if y in U)
        dist = {a: 0.0}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in self.state.adj[x]:
                if y in U and y not in dist:
                    dist[y] = dist[x] + self.state.w(x, y)
                    stack.append(y)
        return sorted(U, key=lambda v: (dist[v], v))

    def leaf(self, U: set[int], t: int) -> None:
        within = U | {t}
        for i in self.targets(U, t):
            S = self.state.tree_path(t, i, within=within)
            weight, noop, _, _ = self.state.apply(S)
            self.rec.add(S, weight, noop)

    def leaf_chain(self, U: set[int], ts: list[int], attach: list[int]) -> None:
        """Absorb ``ts`` in order, each a leaf of the region grown so far."""
        if not ts:
            return
        st = self.state
        pairs = [(u, v) for u in U for v in st.adj[u] if v in U and u < v]
        root = min(U)
        parent, active = _fast.parents_from_edges(st.n, pairs, root)
        weights, flat, offsets, parent, active = _fast.eat_leaves(
            self.graph.matrix,
            parent,
            active,
            root,
            np.asarray(ts, dtype=np.int64),
            np.asarray(attach, dtype=np.int64),
            self.rec.record_sets,
            self.order == "nearest",
        )
        sets = None
        if self.rec.record_sets:
            fl = flat.tolist()
            off = offsets.tolist()
            sets = [fl[off[j]:off[j + 1]] for j in range(len(weights))]
        self.rec.extend(weights, sets)
        for u, v in pairs:
            st.remove_edge(u, v)
        for t, a in zip(ts, attach):
            st.remove_edge(t, a)
        for u, v in _fast.edges_from_parents(parent, active):
            st.add_edge(u, v)

    # -- general absorption -------------------------------------------------

    def vertex(self, U: set[int], t: int) -> None:
        st = self.state
        nbrs = sorted(y for y in st.adj[t] if y in U)
        if not nbrs:
            raise GraphError(f"vertex {t} has no neighbour in the current region")
        if len(nbrs) == 1:
            if self.fast:
                self.leaf_chain(U, [t], nbrs)
            else:
                self.leaf(U, t)
            return
        part = voronoi_partition(st, U, nbrs)
        for cell in part.cells():
            cset = set(cell)
            if self.fast:
                self._leaf_in_cell(cset, t, part.sources[part.cell[cell[0]]])
            else:
                self.leaf(cset, t)
        self.cycles(U | {t})

    def _leaf_in_cell(self, cell: set[int], t: int, source: int) -> None:
        # the kernel sees only H[cell + t]; the other edges at t stay put
        st = self.state
        others = [y for y in st.adj[t] if y not in cell]
        for y in others:
            st.remove_edge(t, y)
        self.leaf_chain(cell, [t], [source])
        for y in others:
            st.add_edge(t, y)

    # -- cycle removal ------------------------------------------------------

    def cycles(self, V: set[int]) -> None:
        st = self.state
        g = self.graph
        vs = sorted(V)
        tree = [edge_endpoints(e) for e in induced_mst_edges(g, vs)]
        tree_set = set(tree)
        for u, v in tree:
            if not st.has_edge(u, v):
                raise GraphError(f"MST edge {(u, v)} of the region is missing from H")
        extra = [(u, v) for u in vs for v in st.adj[u] if v in V and u < v and (u, v) not in tree_set]
        if not extra:
            return
        if self.fast:
            eu = np.asarray([p[0] for p in tree], dtype=np.int64)
            ev = np.asarray([p[1] for p in tree], dtype=np.int64)
            dist, hops = _fast.tree_all_pairs(st.n, eu, ev, g.matrix)
            a = np.asarray([p[0] for p in extra], dtype=np.int64)
            b = np.asarray([p[1] for p in extra], dtype=np.int64)
            idx = (b - 1) * (b - 2) // 2 + (a - 1)
            order = np.lexsort((idx, hops[a, b]))
            weights = g.matrix[a, b][order] + dist[a, b][order]
            sets = None
            if self.rec.record_sets:
                paths = _PathFinder(tree)
                sets = [paths.path(int(a[j]), int(b[j])) for j in order.tolist()]
            self.rec.extend(weights, sets)
            for j in order.tolist():
                st.remove_edge(int(a[j]), int(b[j]))
            return
        paths = _PathFinder(tree)
        keyed = sorted((len(paths.path(u, v)), edge_index(u, v), u, v) for u, v in extra)
        for _, _, u, v in keyed:
            S = paths.path(u, v)
            weight, noop, _, _ = st.apply(S)
            self.rec.add(S, weight, noop)


class _PathFinder:
    """Paths in a fixed tree, with parent arrays cached per source."""

    def __init__(self, pairs):
        self.adj: dict[int, list[int]] = {}
        for u, v in pairs:
            self.adj.setdefault(u, []).append(v)
            self.adj.setdefault(v, []).append(u)
        self._parents: dict[int, dict[int, int]] = {}

    def path(self, u: int, v: int) -> list[int]:
        par = self._parents.get(u)
        if par is None:
            par = {u: 0}
            stack = [u]
            while stack:
                x = stack.pop()
                for y in self.adj.get(x, ()):
                    if y not in par:
                        par[y] = x
                        stack.append(y)
            self._parents[u] = par
        out = [v]
        while out[-1] != u:
            out.append(par[out[-1]])
        return out[::-1]


def _check_region_is_mst(graph: WeightedCompleteGraph, state: LocalState, U: set[int]) -> None:
    have = {edge_index(u, v) for u in U for v in state.adj[u] if v in U and u < v}
    if have != set(induced_mst_edges(graph, U)):
        raise GraphError("H[U] is not the MST of G[U]")


def _finish(graph, H, state, rec, region=None) -> SequenceTrace:
    trace = rec.finish(graph, H, state.to_subgraph())
    if region is not None:
        have = {edge_index(u, v) for u in region for v in state.adj[u] if v in region and u < v}
        trace.audit["region_is_mst"] = have == set(induced_mst_edges(graph, region))
    return trace


def absorb_leaf(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    U: Iterable[int],
    x: int,
    fast: bool = False,
    record_sets: bool = True,
    target_order: str = "nearest",
) -> SequenceTrace:
    """Absorb a vertex ``x`` with exactly one neighbour in ``U`` into the region ``U``.

    Step ``i`` is the tree path from ``x`` to the ``i``-th target of ``U``;
    targets go nearest first (``target_order="nearest"``) or by label.
    Requires ``H[U] = MST(G[U])``.
    """
    U = set(U)
    if x in U or not U:
        raise InvalidParameter("x must lie outside a non-empty U")
    state = LocalState(graph, H)
    nbrs = [y for y in state.adj[x] if y in U]
    if len(nbrs) != 1:
        raise GraphError(f"vertex {x} has {len(nbrs)} neighbours in U, expected exactly one")
    _check_region_is_mst(graph, state, U)
    rec = TraceRecorder(record_sets)
    eng = _Engine(graph, state, rec, fast, target_order)
    if fast:
        eng.leaf_chain(U, [x], nbrs)
    else:
        eng.leaf(U, x)
    return _finish(graph, H, state, rec, U | {x})


def absorb_vertex(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    t: int | None = None,
    U: Iterable[int] | None = None,
    fast: bool = False,
    record_sets: bool = True,
    target_order: str = "nearest",
) -> SequenceTrace:
    """Absorb ``t`` (default ``n``) into ``U`` (default every other vertex).

    Requires ``H[U] = MST(G[U])`` and at least one edge from ``t`` to ``U``.
    Phases: ``cells`` for the per-cell leaf absorptions, ``cycles`` for the
    cycle removal.
    """
    t = graph.n if t is None else t
    U = set(range(1, graph.n + 1)) - {t} if U is None else set(U)
    if t in U or not U:
        raise InvalidParameter("t must lie outside a non-empty U")
    state = LocalState(graph, H)
    _check_region_is_mst(graph, state, U)
    rec = TraceRecorder(record_sets)
    eng = _Engine(graph, state, rec, fast, target_order)
    nbrs = sorted(y for y in state.adj[t] if y in U)
    if not nbrs:
        raise GraphError(f"vertex {t} has no neighbour in U")
    rec.begin("cells")
    if len(nbrs) == 1:
        if fast:
            eng.leaf_chain(U, [t], nbrs)
        else:
            eng.leaf(U, t)
    else:
        part = voronoi_partition(state, U, nbrs)
        for cell in part.cells():
            if fast:
                eng._leaf_in_cell(set(cell), t, part.sources[part.cell[cell[0]]])
            else:
                eng.leaf(set(cell), t)
        rec.begin("cycles")
        eng.cycles(U | {t})
    return _finish(graph, H, state, rec, U | {t})


def remove_cycles(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    vertices: Iterable[int] | None = None,
    fast: bool = False,
    record_sets: bool = True,
) -> SequenceTrace:
    """Delete every non-MST edge of ``H[V]``, shortest MST path first.

    Each step is the vertex set of the MST path between the endpoints of
    the deleted edge; its weight is that edge plus the path.  Requires
    ``MST(G[V]) ⊆ H``.
    """
    V = set(range(1, graph.n + 1)) if vertices is None else set(vertices)
    state = LocalState(graph, H)
    rec = TraceRecorder(record_sets)
    _Engine(graph, state, rec, fast).cycles(V)
    return _finish(graph, H, state, rec, V)


def check_increments(H: SpanningSubgraph, U0: Iterable[int], order: Sequence[int]) -> None:
    seen = set(U0)
    adj = H.adjacency
    for t in order:
        if t in seen:
            raise InvalidParameter(f"vertex {t} is added twice")
        if not adj.get(t, set()) & seen:
            raise GraphError(f"adding {t} leaves H[U] disconnected")
        seen.add(t)


def run_increments(
    graph: WeightedCompleteGraph,
    state: LocalState,
    rec: TraceRecorder,
    U0: Iterable[int],
    order: Sequence[int],
    fast: bool = True,
    target_order: str = "nearest",
) -> None:
    """Drive the absorptions for ``order`` on an existing state (no validation)."""
    eng = _Engine(graph, state, rec, fast, target_order)
    U = set(U0)
    run: list[int] = []
    attach: list[int] = []
    run_base = set(U)
    for t in order:
        nbrs = [y for y in state.adj[t] if y in U]
        if fast and len(nbrs) == 1:
            if not run:
                run_base = set(U)
            run.append(t)
            attach.append(nbrs[0])
            U.add(t)
            continue
        if run:
            eng.leaf_chain(run_base, run, attach)
            run, attach = [], []
        eng.vertex(U, t)
        U.add(t)
    if run:
        eng.leaf_chain(run_base, run, attach)


def eat(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    U0: Iterable[int],
    order: Sequence[int] | None = None,
    fast: bool = True,
    record_sets: bool = True,
    check: bool = True,
    target_order: str = "nearest",
) -> SequenceTrace:
    """Grow ``U0`` to ``[n]`` one vertex at a time (BFS order by default).

    Requires ``H[U0] = MST(G[U0])`` and every prefix region connected in ``H``.
    """
    U0 = set(U0)
    if not U0:
        raise InvalidParameter("U0 must be non-empty")
    if order is None:
        order = bfs_increment_order(H, U0)
    order = list(order)
    if len(U0) + len(order) != graph.n or set(order) & U0 or len(set(order)) != len(order):
        raise InvalidParameter("U0 plus the increments must cover [n] exactly once")
    state = LocalState(graph, H)
    if check:
        check_increments(H, U0, order)
        _check_region_is_mst(graph, state, U0)
    rec = TraceRecorder(record_sets)
    run_increments(graph, state, rec, U0, order, fast, target_order)
    return _finish(graph, H, state, rec)
