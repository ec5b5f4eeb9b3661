"""Weighted complete graphs, spanning subgraphs and start-graph factories.

Vertices are labelled ``1..n``.  The edge ``uv`` with ``u < v`` has linear
index ``(v-1)(v-2)/2 + (u-1)``, so edges are enumerated column by column:
12, 13, 23, 14, 24, 34, ...

Wherever an argument needs distinct weights, edges are compared by the pair
``(weight, linear index)``.  That order is strict, which makes the MST unique
and every construction in the package deterministic.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .distributions import UNIFORM, EdgeWeightDistribution, Uniform
from .errors import DistributionError, GraphError, InvalidParameter

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class EdgeId(NamedTuple):
    u: int
    v: int
    linear: int


def num_edges(n: int) -> int:
    return n * (n - 1) // 2


def edge_index(u: int, v: int) -> int:
    if u == v:
        raise InvalidParameter(f"loop {u}{v} is not an edge")
    if u > v:
        u, v = v, u
    if u < 1:
        raise InvalidParameter(f"vertices are 1-based, got {u}")
    return (v - 1) * (v - 2) // 2 + (u - 1)


def edge_endpoints(index: int) -> tuple[int, int]:
    if index < 0:
        raise InvalidParameter(f"negative edge index {index}")
    m = (1 + math.isqrt(1 + 8 * index)) // 2  # largest m with m(m-1)/2 <= index
    return index - m * (m - 1) // 2 + 1, m + 1


def edge_id(u: int, v: int) -> EdgeId:
    if u > v:
        u, v = v, u
    return EdgeId(u, v, edge_index(u, v))


def endpoints_array(indices) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`edge_endpoints` for an integer array."""
    k = np.asarray(indices, dtype=np.int64)
    m = ((1 + np.sqrt(1.0 + 8.0 * k)) // 2).astype(np.int64)
    # float sqrt can be off by one for very large k
    m = np.where(m * (m - 1) // 2 > k, m - 1, m)
    m = np.where((m + 1) * m // 2 <= k, m + 1, m)
    return k - m * (m - 1) // 2 + 1, m + 1


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = x + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def edge_uniforms(seed: int, indices) -> np.ndarray:
    """Uniform(0,1) variates attached to edges, as a pure function of
    ``(seed, linear index)``.

    The stream key is ``splitmix64(seed)``; edge ``k`` receives
    ``splitmix64(key ^ ((k + 1) * golden))`` whose top 53 bits are mapped to
    the open interval (0, 1).  Any subset of edges can therefore be drawn
    without materialising the rest of the graph.
    """
    idx = np.asarray(indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
        bits = _splitmix64(key ^ ((idx + np.uint64(1)) * _GOLDEN))
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def edge_weights(dist: EdgeWeightDistribution, seed: int, indices) -> np.ndarray:
    """Weights of the given edges in ``sample_graph(n, dist, seed)`` (any n)."""
    w = np.asarray(dist.inverse_cdf(edge_uniforms(seed, indices)), dtype=np.float64)
    if w.size and not (np.all(np.isfinite(w)) and np.all(w > 0)):
        raise DistributionError(f"{dist!r} produced non-finite or non-positive weights")
    return w


@dataclass(frozen=True, eq=False)
class WeightedCompleteGraph:
    n: int
    weights: np.ndarray
    seed: int | None = None
    distribution: EdgeWeightDistribution = field(default=UNIFORM)

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameter(f"need at least one vertex, got n={self.n}")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (num_edges(self.n),):
            raise InvalidParameter(
                f"expected {num_edges(self.n)} weights for n={self.n}, got {w.shape[0] if w.ndim else w}"
            )
        if w.size and not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise InvalidParameter("weights must be finite and strictly positive")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def num_edges(self) -> int:
        return num_edges(self.n)

    @property
    def rho_star(self) -> float:
        return self.distribution.rho_star

    def weight(self, u: int, v: int) -> float:
        return float(self.weights[edge_index(u, v)])

    def key(self, index: int) -> tuple[float, int]:
        """Sort key realising the strict total order on edges."""
        return (float(self.weights[index]), index)

    def total(self, edges: Iterable[int]) -> float:
        edges = list(edges)
        if not edges:
            return 0.0
        return float(self.weights[np.fromiter(edges, dtype=np.int64, count=len(edges))].sum())

    def max_weight(self) -> float:
        return float(self.weights.max()) if self.weights.size else 0.0

    @cached_property
    def matrix(self) -> np.ndarray:
        """Dense ``(n+1) x (n+1)`` symmetric weight matrix (row/col 0 unused, zero diagonal)."""
        n = self.n
        m = np.zeros((n + 1, n + 1), dtype=np.float64)
        if n >= 2:
            u, v = endpoints_array(np.arange(self.num_edges))
            m[u, v] = self.weights
            m[v, u] = self.weights
        m.setflags(write=False)
        return m

    @cached_property
    def _wlist(self) -> list[list[float]]:
        return self.matrix.tolist()

    def sorted_edges(self) -> np.ndarray:
        """All edge indices in increasing (weight, index) order."""
        return np.argsort(self.weights, kind="stable")

    def induced_sorted_edges(self, vertices: Iterable[int]) -> list[int]:
        vs = sorted(set(vertices))
        idx = [edge_index(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]]
        w = self.weights
        idx.sort(key=lambda k: (w[k], k))
        return idx

    def __repr__(self) -> str:
        return f"WeightedCompleteGraph(n={self.n}, seed={self.seed}, dist={self.distribution.spec})"


def sample_graph(n: int, dist: EdgeWeightDistribution = UNIFORM, seed: int = 0) -> WeightedCompleteGraph:
    """Complete graph on ``n`` vertices with i.i.d. weights drawn from ``dist``.

    Weights are ``dist.inverse_cdf`` applied to :func:`edge_uniforms`, so two
    calls with the same arguments return bit-identical graphs, and the same
    edge gets the same uniform under every distribution.
    """
    if n < 2:
        raise InvalidParameter(f"n must be at least 2, got {n}")
    w = edge_weights(dist, seed, np.arange(num_edges(n)))
    return WeightedCompleteGraph(n, w, seed, dist)


def make_fixed_graph(n: int, weights, dist: EdgeWeightDistribution | None = None) -> WeightedCompleteGraph:
    w = np.asarray(list(weights), dtype=np.float64)
    if w.shape[0] != num_edges(n):
        raise InvalidParameter(f"length mismatch: n={n} needs {num_edges(n)} weights, got {w.shape[0]}")
    if dist is None:
        dist = UNIFORM
        if w.size and w.max() > 1.0:
            dist = Uniform(float(w.max()))
    return WeightedCompleteGraph(n, w, None, dist)


def load_graph(path) -> WeightedCompleteGraph:
    """Read the text format: first line ``n``, then ``u v weight`` per line."""
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise GraphError(f"{path}: empty graph file")
    n = int(lines[0])
    w = np.full(num_edges(n), np.nan)
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise GraphError(f"{path}:{lineno}: expected 'u v weight'")
        u, v, x = int(parts[0]), int(parts[1]), float(parts[2])
        if not 1 <= u < v <= n:
            raise GraphError(f"{path}:{lineno}: need 1 <= u < v <= n, got {u} {v}")
        k = edge_index(u, v)
        if not np.isnan(w[k]):
            raise GraphError(f"{path}:{lineno}: duplicate edge {u} {v}")
        w[k] = x
    if np.isnan(w).any():
        k = int(np.flatnonzero(np.isnan(w))[0])
        raise GraphError(f"{path}: missing weight for edge {edge_endpoints(k)}")
    return make_fixed_graph(n, w)


def save_graph(graph: WeightedCompleteGraph, path) -> None:
    out = [str(graph.n)]
    for k, x in enumerate(graph.weights.tolist()):
        u, v = edge_endpoints(k)
        out.append(f"{u} {v} {x!r}")
    Path(path).write_text("\n".join(out) + "\n")


@dataclass(frozen=True, eq=False)
class SpanningSubgraph:
    """Edge set over the vertex set ``1..n`` (edges given by linear index)."""

    n: int
    edges: frozenset

    def __post_init__(self):
        edges = frozenset(int(e) for e in self.edges)
        limit = num_edges(self.n)
        bad = [e for e in edges if not 0 <= e < limit]
        if bad:
            raise GraphError(f"edge index {bad[0]} out of range for n={self.n}")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "SpanningSubgraph":
        edges = set()
        for u, v in pairs:
            if not (1 <= u <= n and 1 <= v <= n) or u == v:
                raise GraphError(f"bad edge ({u}, {v}) for n={n}")
            edges.add(edge_index(u, v))
        return cls(n, frozenset(edges))

    def __eq__(self, other) -> bool:
        return isinstance(other, SpanningSubgraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, item) -> bool:
        if isinstance(item, tuple):
            item = edge_index(*item)
        return item in self.edges

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(edge_endpoints(e) for e in self.edges)

    @cached_property
    def adjacency(self) -> dict[int, set[int]]:
        adj: dict[int, set[int]] = {v: set() for v in range(1, self.n + 1)}
        for e in self.edges:
            u, v = edge_endpoints(e)
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def weight(self, graph: WeightedCompleteGraph) -> float:
        return graph.total(self.edges)

    def induced_edges(self, vertices: Iterable[int]) -> set[int]:
        vs = set(vertices)
        adj = self.adjacency
        return {edge_index(u, v) for u in vs for v in adj[u] if v in vs and u < v}

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        """Connectivity of ``H`` (or of the induced subgraph ``H[vertices]``)."""
        vs = set(range(1, self.n + 1)) if vertices is None else set(vertices)
        return is_connected_on(self.adjacency, vs)

    def is_spanning_tree(self) -> bool:
        return len(self.edges) == self.n - 1 and self.is_connected()

    def with_edges(self, add=(), remove=()) -> "SpanningSubgraph":
        return SpanningSubgraph(self.n, (self.edges - frozenset(remove)) | frozenset(add))

    def __repr__(self) -> str:
        return f"SpanningSubgraph(n={self.n}, edges={self.pairs()})"


def is_connected_on(adj, vertices: set[int]) -> bool:
    if not vertices:
        return True
    start = next(iter(vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y in vertices and y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(vertices)


def prufer_decode(sequence, n: int) -> list[tuple[int, int]]:
    """Labelled tree on ``1..n`` encoded by a Prüfer sequence of length n-2."""
    seq = [int(x) for x in sequence]
    if n < 2 or len(seq) != n - 2:
        raise InvalidParameter(f"Prüfer sequence for n={n} must have length {max(n - 2, 0)}")
    if any(not 1 <= x <= n for x in seq):
        raise InvalidParameter("Prüfer entries must lie in 1..n")
    degree = [1] * (n + 1)
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(1, n + 1) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((min(leaf, x), max(leaf, x)))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    a, b = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((a, b))
    return edges


def random_tree_edges(n: int, seed: int) -> list[tuple[int, int]]:
    rng = np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0x7265]))
    if n == 2:
        return [(1, 2)]
    return prufer_decode(rng.integers(1, n + 1, size=n - 2), n)


START_KINDS = ("path", "star", "clique", "random_tree", "explicit")


def make_start_graph(kind: str, n: int, seed: int = 0, edges=None) -> SpanningSubgraph:
    """Start subgraph for local search.

    ``kind`` is one of ``path`` (edges i(i+1)), ``star`` (centre n),
    ``clique``, ``random_tree`` (uniform labelled tree from a seeded Prüfer
    sequence) or ``explicit`` (``edges`` given as vertex pairs).
    """
    if n < 2:
        raise InvalidParameter(f"n must be at least 2, got {n}")
    if kind == "path":
        H = SpanningSubgraph.from_pairs(n, [(i, i + 1) for i in range(1, n)])
    elif kind == "star":
        H = SpanningSubgraph.from_pairs(n, [(i, n) for i in range(1, n)])
    elif kind == "clique":
        H = SpanningSubgraph(n, frozenset(range(num_edges(n))))
    elif kind in ("random_tree", "random_spanning_tree"):
        H = SpanningSubgraph.from_pairs(n, random_tree_edges(n, seed))
    elif kind == "explicit":
        if edges is None:
            raise GraphError("explicit start graph needs an edge list")
        H = SpanningSubgraph.from_pairs(n, [tuple(map(int, e)) for e in edges])
        if not H.is_connected():
            raise GraphError("explicit start graph is not connected")
    else:
        raise InvalidParameter(f"unknown start graph kind {kind!r}; expected one of {START_KINDS}")
    return H
