"""Large induced cliques, stars and paths in connected graphs.

Every connected graph on ``n`` vertices has an induced clique, star or path
on at least ``sqrt(log2 n) / 2`` vertices.  Low maximum degree forces a
long shortest path, and a high-degree vertex has a neighbourhood large
enough for the pivot Ramsey recursion to find a clique or an independent
set in it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import GraphError, InvalidParameter
from .graphs import SpanningSubgraph

KINDS = ("clique", "star", "path")


@dataclass(frozen=True)
class StructuralWitness:
    """An induced clique, star or path.

    ``vertices`` is ordered: along the path for paths, sorted leaves followed
    by the centre for stars, sorted for cliques.
    """

    kind: str
    vertices: tuple[int, ...]
    center: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidParameter(f"unknown witness kind {self.kind!r}")
        if self.kind == "star" and self.center != self.vertices[-1]:
            raise InvalidParameter("star witnesses list their centre last")

    @property
    def size(self) -> int:
        return len(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)


def size_bound(n: int) -> int:
    """Guaranteed witness size ``ceil(sqrt(log2 n) / 2)``."""
    if n < 2:
        return 1
    return math.ceil(0.5 * math.sqrt(math.log2(n)))


def degree_threshold(n: int) -> float:
    """``m = n ** (1 / sqrt(log2 n))``, the degree that triggers the Ramsey branch."""
    if n < 2:
        return 1.0
    return n ** (1.0 / math.sqrt(math.log2(n)))


def certify(adj: Mapping[int, set[int]], w: StructuralWitness) -> bool:
    """Exact induced-subgraph check, linear in the degrees of the witness."""
    vs = w.vertices
    vset = set(vs)
    if len(vset) != len(vs):
        return False
    k = len(vs)
    induced = sum(len(adj.get(v, set()) & vset) for v in vs) // 2
    if w.kind == "clique":
        return induced == k * (k - 1) // 2
    if w.kind == "star":
        c = w.center
        return induced == k - 1 and all(x in adj.get(c, set()) for x in vs[:-1])
    return induced == k - 1 and all(vs[i + 1] in adj.get(vs[i], set()) for i in range(k - 1))


def pivot_ramsey(adj: Mapping[int, set[int]], vertices: Iterable[int]) -> tuple[str, list[int]]:
    """Clique or independent set of size at least ``ceil(log2(M) / 2)`` among ``vertices``.

    The smallest remaining vertex becomes the pivot and the search continues
    in the larger of its neighbours and non-neighbours (neighbours on ties).
    Pivots that chose neighbours form a clique, the others an independent
    set; the last pivot fits both.  Returns ``("clique" | "independent", sorted set)``.
    """
    cand = sorted(set(vertices))
    if not cand:
        raise InvalidParameter("pivot_ramsey needs at least one vertex")
    toward_nbrs: list[int] = []
    toward_non: list[int] = []
    last = None
    while cand:
        p = cand[0]
        nb = adj.get(p, set())
        inside = [x for x in cand[1:] if x in nb]
        outside = [x for x in cand[1:] if x not in nb]
        if len(cand) == 1:
            last = p
            break
        if len(inside) >= len(outside):
            toward_nbrs.append(p)
            cand = inside
        else:
            toward_non.append(p)
            cand = outside
    clique = sorted(toward_nbrs + [last])
    indep = sorted(toward_non + [last])
    if len(clique) >= len(indep):
        return "clique", clique
    return "independent", indep


def _bfs(adj, source: int, n: int) -> tuple[dict[int, int], list[int]]:
    parent = {source: 0}
    order = [source]
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in sorted(adj.get(x, ())):
            if y not in parent:
                parent[y] = x
                order.append(y)
                queue.append(y)
    return parent, order


def longest_shortest_path(adj, n: int) -> list[int]:
    """Shortest path between the ends of a double BFS sweep (always induced)."""
    _, order = _bfs(adj, 1, n)
    a = order[-1]
    parent, order = _bfs(adj, a, n)
    b = order[-1]
    path = [b]
    while path[-1] != a:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _star(adj, v: int, leaves: Iterable[int]) -> StructuralWitness:
    return StructuralWitness("star", tuple(sorted(leaves)) + (v,), v)


def _path(vs: list[int]) -> StructuralWitness:
    # orient so the smaller end comes first
    if vs[-1] < vs[0]:
        vs = vs[::-1]
    return StructuralWitness("path", tuple(vs))


def _greedy_independent(adj, cand: Iterable[int]) -> list[int]:
    out: list[int] = []
    for x in sorted(cand):
        if not any(y in adj.get(x, set()) for y in out):
            out.append(x)
    return out


def _greedy_clique(adj, v: int) -> list[int]:
    out = [v]
    for x in sorted(adj.get(v, ())):
        if all(x in adj.get(y, set()) for y in out):
            out.append(x)
    return sorted(out)


def find_witness(H: SpanningSubgraph) -> StructuralWitness:
    """Induced clique, star or path of size at least :func:`size_bound`."""
    n = H.n
    if n < 2:
        raise InvalidParameter("need at least two vertices")
    if not H.is_connected():
        raise GraphError("H must be connected")
    adj = H.adjacency
    degs = {v: len(adj.get(v, ())) for v in range(1, n + 1)}
    delta = max(degs.values())
    v = min(x for x in degs if degs[x] == delta)
    # on ties the earlier candidate wins: path, then star, then clique
    candidates = [_path(longest_shortest_path(adj, n))]
    if delta >= math.ceil(degree_threshold(n)):
        tag, chosen = pivot_ramsey(adj, adj[v])
        if tag == "clique":
            candidates.append(StructuralWitness("clique", tuple(sorted(chosen + [v]))))
        else:
            candidates.append(_star(adj, v, chosen))
    if n <= 16:
        candidates.append(_star(adj, v, _greedy_independent(adj, adj[v])))
        candidates.append(StructuralWitness("clique", tuple(_greedy_clique(adj, v))))
    best = candidates[0]
    for c in candidates[1:]:
        if c.size > best.size:
            best = c
    if best.kind == "star" and best.size == 2:
        best = _path(list(best.vertices))
    if best.kind == "clique" and best.size == 2:
        best = _path(list(best.vertices))
    if best.size < size_bound(n) or not certify(adj, best):
        raise GraphError(f"witness extraction failed: {best}")
    return best
