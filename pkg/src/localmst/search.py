"""The local improvement operator and optimizing sequences.

``phi(G, H, S)`` replaces the induced subgraph ``H[S]`` by the minimum
spanning tree of ``G[S]`` when ``H[S]`` is connected and leaves ``H``
alone otherwise.  A sequence of vertex sets applied one after another is an
optimizing sequence; the weight of a step is the total weight of the
subgraph it replaces, and the weight of the sequence is the largest step.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import GraphError, InvalidParameter
from .graphs import SpanningSubgraph, WeightedCompleteGraph, edge_endpoints, edge_index
from .kruskal import UnionFind, mst_edges


@dataclass
class OptimizingSequence:
    sets: list[tuple[int, ...]]

    def __init__(self, sets: Iterable[Iterable[int]] = ()):
        self.sets = [tuple(sorted(set(int(v) for v in s))) for s in sets]
        for s in self.sets:
            if not s:
                raise InvalidParameter("optimizing sequence contains an empty set")

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def validate(self, n: int) -> None:
        for s in self.sets:
            if s[0] < 1 or s[-1] > n:
                raise InvalidParameter(f"set {list(s)} is not a subset of [{n}]")


class LocalState:
    """Mutable subgraph ``H`` on which optimizing steps are applied in place."""

    def __init__(self, graph: WeightedCompleteGraph, H: SpanningSubgraph):
        if H.n != graph.n:
            raise InvalidParameter(f"subgraph has n={H.n}, graph has n={graph.n}")
        self.graph = graph
        self.n = graph.n
        self.adj: list[set[int]] = [set() for _ in range(self.n + 1)]
        self.num_edges = 0
        for e in H.edges:
            u, v = edge_endpoints(e)
            self.adj[u].add(v)
            self.adj[v].add(u)
            self.num_edges += 1
        self._w = graph._wlist

    def w(self, u: int, v: int) -> float:
        return self._w[u][v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def add_edge(self, u: int, v: int) -> None:
        if v not in self.adj[u]:
            self.adj[u].add(v)
            self.adj[v].add(u)
            self.num_edges += 1

    def remove_edge(self, u: int, v: int) -> None:
        if v in self.adj[u]:
            self.adj[u].discard(v)
            self.adj[v].discard(u)
            self.num_edges -= 1

    def induced_pairs(self, S: Iterable[int]) -> list[tuple[int, int]]:
        sset = S if isinstance(S, (set, frozenset)) else set(S)
        return sorted((u, v) for u in sset for v in self.adj[u] & sset if u < v)

    def induced_weight(self, S: Iterable[int]) -> float:
        return sum(self._w[u][v] for u, v in self.induced_pairs(S))

    def is_connected_on(self, S: Iterable[int]) -> bool:
        sset = set(S)
        if not sset:
            return True
        start = next(iter(sset))
        seen = {start}
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in self.adj[x] & sset:
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == len(sset)

    def local_mst(self, S: Sequence[int]) -> list[tuple[int, int]]:
        vs = sorted(S)
        wl = self._w
        pairs = [(wl[a][b], edge_index(a, b), a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]
        pairs.sort()
        pos = {v: i for i, v in enumerate(vs)}
        uf = UnionFind(len(vs))
        out = []
        for _, _, a, b in pairs:
            if uf.union(pos[a], pos[b]):
                out.append((a, b))
                if len(out) == len(vs) - 1:
                    break
        return out

    def apply(self, S: Iterable[int]) -> tuple[float, bool, list, list]:
        """Apply one step in place.

        Returns ``(step weight, no-op flag, removed pairs, added pairs)``;
        a disconnected ``H[S]`` is a no-op of weight 0.
        """
        sset = set(S)
        if not self.is_connected_on(sset):
            return 0.0, True, [], []
        induced = self.induced_pairs(sset)
        weight = sum(self._w[u][v] for u, v in induced)
        new = self.local_mst(sset)
        old_set = set(induced)
        new_set = set(new)
        removed = [p for p in induced if p not in new_set]
        added = [p for p in new if p not in old_set]
        for u, v in removed:
            self.remove_edge(u, v)
        for u, v in added:
            self.add_edge(u, v)
        return weight, False, removed, added

    def edge_set(self) -> frozenset:
        return frozenset(edge_index(u, v) for u in range(1, self.n + 1) for v in self.adj[u] if u < v)

    def to_subgraph(self) -> SpanningSubgraph:
        return SpanningSubgraph(self.n, self.edge_set())

    def tree_path(self, u: int, v: int, within: set[int] | None = None) -> list[int]:
        """Vertices of a BFS path from ``u`` to ``v`` (the unique one when H is a tree)."""
        parent = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            if x == v:
                break
            for y in self.adj[x]:
                if y not in parent and (within is None or y in within):
                    parent[y] = x
                    queue.append(y)
        if v not in parent:
            raise GraphError(f"no path from {u} to {v}")
        path = [v]
        while path[-1] != u:
            path.append(parent[path[-1]])
        path.reverse()
        return path


def phi(graph: WeightedCompleteGraph, H: SpanningSubgraph, S: Iterable[int]) -> SpanningSubgraph:
    """One local improvement step ``Φ(H, S)``."""
    S = set(int(v) for v in S)
    if not S or min(S) < 1 or max(S) > graph.n:
        raise InvalidParameter(f"S must be a non-empty subset of [{graph.n}]")
    state = LocalState(graph, H)
    _, noop, _, _ = state.apply(S)
    return H if noop else state.to_subgraph()


@dataclass
class SequenceTrace:
    """Outcome of running an optimizing sequence.

    ``step_weights[i]`` is the weight of ``H_i[S_{i+1}]`` (0 for no-op
    steps).  ``sets`` holds the sorted vertex sets, or ``None`` when the
    producer was asked not to record them; ``phases`` names contiguous
    step ranges ``[start, stop)`` of composite constructions.
    """

    n: int
    initial: SpanningSubgraph
    final: SpanningSubgraph
    step_weights: np.ndarray
    noop: np.ndarray
    sets: list[tuple[int, ...]] | None
    reached_mst: bool
    phases: list[tuple[str, int, int]] = field(default_factory=list)
    audit: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.step_weights)

    @property
    def wt_max(self) -> float:
        return float(self.step_weights.max()) if len(self.step_weights) else 0.0

    def phase_wt(self, name: str) -> float:
        out = 0.0
        for label, a, b in self.phases:
            if label == name and b > a:
                out = max(out, float(self.step_weights[a:b].max()))
        return out

    def sequence(self) -> OptimizingSequence:
        if self.sets is None:
            raise InvalidParameter("trace was produced without recording its sets")
        return OptimizingSequence(self.sets)

    def subgraphs(self, graph: WeightedCompleteGraph) -> Iterator[SpanningSubgraph]:
        """Replay ``H_0, ..., H_m``."""
        if self.sets is None:
            raise InvalidParameter("trace was produced without recording its sets")
        state = LocalState(graph, self.initial)
        yield self.initial
        for s in self.sets:
            state.apply(s)
            yield state.to_subgraph()

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "initial_edges": [list(p) for p in self.initial.pairs()],
            "final_edges": [list(p) for p in self.final.pairs()],
            "sets": None if self.sets is None else [list(s) for s in self.sets],
            "step_weights": [float(x) for x in self.step_weights],
            "noop": [bool(x) for x in self.noop],
            "wt_max": self.wt_max,
            "reached_mst": self.reached_mst,
            "phases": [list(p) for p in self.phases],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class TraceRecorder:
    """Accumulates steps from several producers into one trace.

    Bulk producers hand over whole arrays, so weights are kept as a list of
    numpy chunks rather than Python floats.
    """

    def __init__(self, record_sets: bool = True):
        self.record_sets = record_sets
        self.sets: list[tuple[int, ...]] | None = [] if record_sets else None
        self.phases: list[tuple[str, int, int]] = []
        self._chunks: list[np.ndarray] = []
        self._noop_chunks: list[np.ndarray] = []
        self._pending: list[float] = []
        self._pending_noop: list[bool] = []
        self._count = 0
        self._open: tuple[str, int] | None = None

    def __len__(self) -> int:
        return self._count

    def _flush(self) -> None:
        if self._pending:
            self._chunks.append(np.asarray(self._pending, dtype=np.float64))
            self._noop_chunks.append(np.asarray(self._pending_noop, dtype=bool))
            self._pending = []
            self._pending_noop = []

    def add(self, S, weight: float, noop: bool = False) -> None:
        self._pending.append(float(weight))
        self._pending_noop.append(bool(noop))
        self._count += 1
        if self.sets is not None:
            self.sets.append(tuple(sorted(S)))

    def extend(self, weights, sets=None) -> None:
        weights = np.asarray(weights, dtype=np.float64)
        if self.sets is not None:
            if sets is None or len(sets) != len(weights):
                raise InvalidParameter("sets are being recorded but were not supplied for every step")
            self.sets.extend(tuple(sorted(s)) for s in sets)
        self._flush()
        self._chunks.append(weights)
        self._noop_chunks.append(np.zeros(len(weights), dtype=bool))
        self._count += len(weights)

    def begin(self, name: str) -> None:
        self.end()
        self._open = (name, self._count)

    def end(self) -> None:
        if self._open is not None:
            name, start = self._open
            self.phases.append((name, start, self._count))
            self._open = None

    def weights(self) -> np.ndarray:
        self._flush()
        return np.concatenate(self._chunks) if self._chunks else np.zeros(0)

    def finish(self, graph: WeightedCompleteGraph, initial: SpanningSubgraph, final: SpanningSubgraph) -> SequenceTrace:
        self.end()
        self._flush()
        noop = np.concatenate(self._noop_chunks) if self._noop_chunks else np.zeros(0, dtype=bool)
        target = frozenset(mst_edges(graph).tolist())
        return SequenceTrace(
            n=graph.n,
            initial=initial,
            final=final,
            step_weights=self.weights(),
            noop=noop,
            sets=self.sets,
            reached_mst=final.edges == target,
            phases=list(self.phases),
        )


def run_sequence(
    graph: WeightedCompleteGraph, H0: SpanningSubgraph, seq: OptimizingSequence | Iterable[Iterable[int]]
) -> SequenceTrace:
    if not isinstance(seq, OptimizingSequence):
        seq = OptimizingSequence(seq)
    seq.validate(graph.n)
    if not H0.is_connected():
        raise GraphError("start subgraph must span [n] connectedly")
    state = LocalState(graph, H0)
    rec = TraceRecorder()
    for s in seq:
        weight, noop, _, _ = state.apply(s)
        rec.add(s, weight, noop)
    return rec.finish(graph, H0, state.to_subgraph())


@dataclass
class PersistenceReport:
    steps_checked: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def check_persistence(trace: SequenceTrace, graph: WeightedCompleteGraph) -> PersistenceReport:
    """Audit a trace for the two persistence facts of optimizing sequences:
    MST edges are never removed once present, and a tree stays a tree."""
    if trace.sets is None:
        raise InvalidParameter("persistence audit needs the recorded sets")
    mst_pairs = {edge_endpoints(e) for e in mst_edges(graph).tolist()}
    state = LocalState(graph, trace.initial)
    violations = []
    for i, s in enumerate(trace.sets, start=1):
        was_tree = state.num_edges == graph.n - 1
        _, _, removed, _ = state.apply(s)
        for p in removed:
            if p in mst_pairs:
                violations.append(f"step {i}: MST edge {p} removed")
        if was_tree and state.num_edges != graph.n - 1:
            violations.append(f"step {i}: tree lost after step")
    if state.edge_set() != trace.final.edges:
        violations.append("replay does not end at the recorded final subgraph")
    return PersistenceReport(len(trace.sets), violations)


def cost1_bounds(graph: WeightedCompleteGraph, H: SpanningSubgraph) -> tuple[float, float]:
    """Bounds ``(lower, upper)`` on the minimum total (L1) weight of an MST sequence."""
    if not H.is_connected():
        raise GraphError("cost bounds need a connected spanning subgraph")
    tree = set(mst_edges(graph).tolist())
    lower = graph.total(e for e in H.edges if e not in tree)
    return lower, H.weight(graph)


@dataclass
class HeavyEdgeReport:
    epsilon: float
    threshold: float
    count: int
    weight_floor: float
    retained: bool | None = None


def heavy_edge_floor(
    graph: WeightedCompleteGraph, H: SpanningSubgraph, epsilon: float, trace: SequenceTrace | None = None
) -> HeavyEdgeReport:
    """Count edges of ``H`` heavier than ``rho* - epsilon``.

    No step of weight at most ``rho* - epsilon`` can touch such an edge, so
    any sequence of that weight ends with all of them, which puts a floor of
    ``count * (rho* - epsilon)`` on the final weight.  With a trace, the
    retention is checked when its weight qualifies.
    """
    rho = graph.rho_star
    if not 0 < epsilon <= rho:
        raise InvalidParameter(f"epsilon must lie in (0, {rho}], got {epsilon}")
    threshold = rho - epsilon
    heavy = [e for e in H.edges if graph.weights[e] > threshold]
    report = HeavyEdgeReport(epsilon, threshold, len(heavy), len(heavy) * threshold)
    if trace is not None and trace.wt_max <= threshold:
        report.retained = all(e in trace.final.edges for e in heavy)
    return report
