"""Distances and diameters on weighted trees."""

from __future__ import annotations

from collections import deque
from typing import Iterable

from .errors import GraphError, InvalidParameter
from .graphs import SpanningSubgraph, WeightedCompleteGraph, edge_endpoints


class TreeView:
    """A tree on an arbitrary vertex set with weights taken from a host graph.

    ``edges`` are linear edge indices of the host graph.  The vertex set
    defaults to the endpoints of the edges (or ``vertices`` when given, which
    allows single-vertex trees).
    """

    def __init__(self, graph: WeightedCompleteGraph, edges: Iterable[int], vertices: Iterable[int] | None = None):
        edges = list(edges)
        adj: dict[int, list[tuple[int, float]]] = {}
        if vertices is not None:
            for v in vertices:
                adj[v] = []
        w = graph.weights
        for e in edges:
            u, v = edge_endpoints(e)
            x = float(w[e])
            adj.setdefault(u, []).append((v, x))
            adj.setdefault(v, []).append((u, x))
        self.graph = graph
        self.edges = edges
        self.adj = adj
        if len(edges) != len(adj) - 1 or not self._connected():
            raise GraphError(f"not a tree: {len(adj)} vertices, {len(edges)} edges")

    @classmethod
    def from_subgraph(cls, graph: WeightedCompleteGraph, H: SpanningSubgraph) -> "TreeView":
        return cls(graph, H.edges, range(1, H.n + 1))

    @property
    def vertices(self) -> list[int]:
        return sorted(self.adj)

    def __len__(self) -> int:
        return len(self.adj)

    def _connected(self) -> bool:
        if not self.adj:
            return False
        start = next(iter(self.adj))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y, _ in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.adj)

    def distances(self, source: int) -> tuple[dict[int, float], dict[int, int], dict[int, int]]:
        """Weighted distance, hop count and parent of every vertex, rooted at ``source``."""
        if source not in self.adj:
            raise InvalidParameter(f"vertex {source} not in tree")
        dist = {source: 0.0}
        hops = {source: 0}
        parent = {source: 0}
        stack = [source]
        while stack:
            x = stack.pop()
            for y, wxy in self.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + wxy
                    hops[y] = hops[x] + 1
                    parent[y] = x
                    stack.append(y)
        return dist, hops, parent


def _farthest(values: dict[int, float]) -> int:
    # smallest label among the maximisers, so sweeps are deterministic
    best = max(values.values())
    return min(v for v, d in values.items() if d == best)


def wdiam(tree: TreeView) -> float:
    """Weighted diameter by double sweep (valid for positive weights on trees)."""
    start = min(tree.adj)
    dist, _, _ = tree.distances(start)
    a = _farthest(dist)
    dist, _, _ = tree.distances(a)
    return max(dist.values())


def diam(tree: TreeView) -> int:
    """Number of edges on a longest path (double BFS)."""
    start = min(tree.adj)
    _, hops, _ = tree.distances(start)
    a = _farthest(hops)
    _, hops, _ = tree.distances(a)
    return max(hops.values())


def tree_path(tree: TreeView, u: int, v: int) -> list[int]:
    """Vertices of the unique ``u``-``v`` path, both endpoints included."""
    if u == v:
        raise InvalidParameter("tree_path needs two distinct vertices")
    if v not in tree.adj:
        raise InvalidParameter(f"vertex {v} not in tree")
    _, _, parent = tree.distances(u)
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def wdiam_of_edges(graph: WeightedCompleteGraph, edges: Iterable[int], vertices: Iterable[int] | None = None) -> float:
    edges = list(edges)
    if not edges:
        return 0.0
    return wdiam(TreeView(graph, edges, vertices))


def hop_distances(adj, sources: Iterable[int], blocked: set[int] | None = None) -> dict[int, int]:
    """Multi-source BFS hop counts over an adjacency mapping ``v -> iterable``."""
    blocked = blocked or set()
    dist = {s: 0 for s in sources}
    queue = deque(dist)
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in dist and y not in blocked:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist
