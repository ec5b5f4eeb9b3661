"""MST sequences from star and path starts, and the end-to-end pipeline.

For a star or path with canonically labelled edges ``e_1 .. e_{k-1}``, the
run index ``I`` is the first position of ``L`` consecutive edges no
heavier than ``W``.  The region spanned by that run is replaced by its MST
in one cheap step, then grown rightwards to the end of the labelling and
leftwards to the start, one vertex per absorption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _fast
from .distributions import UNIFORM, EdgeWeightDistribution
from .eating import _Engine, run_increments
from .errors import GraphError, InvalidParameter
from .graphs import SpanningSubgraph, WeightedCompleteGraph, edge_index, edge_weights, sample_graph
from .kruskal import induced_mst_edges
from .search import LocalState, SequenceTrace, TraceRecorder
from .seeds import trial_seed
from .trees import wdiam_of_edges
from .witness import StructuralWitness, find_witness


@dataclass(frozen=True)
class Labeling:
    """Canonical labels of a star or path on vertices ``order[0..k-1]``.

    Canonical label ``j`` (1-based) is vertex ``order[j-1]``.  Path edges
    are ``e_i = (i, i+1)``; star edges are ``e_i = (i, k)`` with the centre
    labelled ``k``.
    """

    kind: str
    order: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.order)

    def edge(self, i: int) -> tuple[int, int]:
        """Original endpoints of ``e_i``."""
        if not 1 <= i <= self.k - 1:
            raise InvalidParameter(f"edge label {i} outside [1, {self.k - 1}]")
        a = self.order[i - 1]
        b = self.order[i] if self.kind == "path" else self.order[-1]
        return (a, b) if a < b else (b, a)

    def edge_indices(self) -> np.ndarray:
        out = np.empty(self.k - 1, dtype=np.int64)
        for i in range(1, self.k):
            out[i - 1] = edge_index(*self.edge(i))
        return out

    def V(self, i: int, j: int) -> list[int]:
        """Original vertices that are endpoints of ``e_i, ..., e_{j-1}``."""
        if not 1 <= i < j <= self.k:
            raise InvalidParameter(f"V({i}, {j}) needs 1 <= i < j <= {self.k}")
        if self.kind == "path":
            labels = range(i, j + 1)
        else:
            labels = list(range(i, j)) + [self.k]
        return [self.order[x - 1] for x in labels]

    @classmethod
    def from_witness(cls, w: StructuralWitness) -> "Labeling":
        if w.kind == "clique":
            raise InvalidParameter("cliques have no canonical edge labelling")
        return cls(w.kind, tuple(w.vertices))


def canonical_labeling(H: SpanningSubgraph) -> Labeling:
    """Relabel a spanning star (centre last) or path (smaller end first)."""
    n = H.n
    if len(H.edges) != n - 1 or not H.is_connected():
        raise GraphError("H is neither a star nor a path")
    adj = H.adjacency
    degs = {v: len(adj.get(v, ())) for v in range(1, n + 1)}
    if max(degs.values()) <= 2:
        ends = sorted(v for v, d in degs.items() if d <= 1)
        order = [ends[0]]
        prev = 0
        while len(order) < n:
            nxt = [y for y in adj[order[-1]] if y != prev][0]
            prev = order[-1]
            order.append(nxt)
        return Labeling("path", tuple(order))
    centers = [v for v, d in degs.items() if d == n - 1]
    if not centers:
        raise GraphError("H is neither a star nor a path")
    c = centers[0]
    return Labeling("star", tuple(sorted(set(range(1, n + 1)) - {c})) + (c,))


@dataclass(frozen=True)
class RunIndex:
    W: float
    L: int
    I: int
    k: int

    @property
    def found(self) -> bool:
        return self.I < self.k - self.L


def default_parameters(k: int) -> tuple[float, int]:
    """``W = 1/ln k`` and ``L = max(2, floor(ln ln k))``."""
    if k < 3:
        raise InvalidParameter("default run parameters need at least 3 vertices")
    return 1.0 / math.log(k), max(2, math.floor(math.log(math.log(k))))


def run_index_from_weights(x: np.ndarray, W: float, L: int) -> int:
    """``(k - L) ∧ min{i : x_i, ..., x_{i+L-1} <= W}`` for edge weights ``x_1..x_{k-1}``."""
    k = len(x) + 1
    if not 2 <= L < k - 1:
        raise InvalidParameter(f"need 2 <= L < k - 1, got L={L}, k={k}")
    ok = np.asarray(x) <= W
    pos = np.arange(1, k)
    # length of the run of light edges ending at each position
    last_heavy = np.maximum.accumulate(np.where(~ok, pos, 0))
    run_len = pos - last_heavy
    hits = np.flatnonzero(run_len >= L)
    if hits.size == 0:
        return k - L
    return int(min(k - L, pos[hits[0]] - L + 1))


def run_index(graph: WeightedCompleteGraph, labeling: Labeling, W: float, L: int) -> RunIndex:
    if not W > 0:
        raise InvalidParameter(f"W must be positive, got {W}")
    x = graph.weights[labeling.edge_indices()]
    return RunIndex(W, L, run_index_from_weights(x, W, L), labeling.k)


@dataclass
class USequence:
    sets: list[list[int]]
    increments: list[int]
    right_minor: int
    right_major: int
    left: int

    @property
    def U0(self) -> list[int]:
        return self.sets[0]


def u_sequence(run: RunIndex, labeling: Labeling) -> USequence:
    """``V(I, I+L), ..., V(I, k), V(I-1, k), ..., V(1, k)`` in original labels.

    The right-minor/right-major/left split is kept as diagnostic counts only.
    """
    I, L, k = run.I, run.L, labeling.k
    if not run.found:
        raise InvalidParameter(f"no run found (I = k - L = {I})")
    sets = [labeling.V(I, j) for j in range(I + L, k + 1)]
    sets += [labeling.V(i, k) for i in range(I - 1, 0, -1)]
    increments = []
    for a, b in zip(sets, sets[1:]):
        diff = set(b) - set(a)
        if len(diff) != 1 or not set(a) <= set(b):
            raise GraphError("U-sequence increment is not a singleton")
        increments.append(diff.pop())
    right = k - I - L
    minor = min(L**20, right)
    return USequence(sets, increments, minor + 1, right - minor, I - 1)


def _solve_labeled(
    graph, state: LocalState, rec: TraceRecorder, labeling: Labeling, W, L, fast: bool, target_order: str = "nearest"
) -> dict:
    """Run the star/path construction for a labelled sub-structure of ``state``."""
    k = labeling.k
    info = {"k": k, "W": W, "L": L, "I": None, "fallback": False}
    if k < 4:
        info["fallback"] = True
    else:
        if W is None or L is None:
            dW, dL = default_parameters(k)
            W = dW if W is None else W
            L = dL if L is None else L
            info["W"], info["L"] = W, L
        run = run_index(graph, labeling, W, L)
        info["I"] = run.I
        info["fallback"] = not run.found
    if info["fallback"]:
        rec.begin("seed")
        S = list(labeling.order)
        weight, noop, _, _ = state.apply(S)
        rec.add(S, weight, noop)
        return info
    U = u_sequence(run, labeling)
    rec.begin("seed")
    weight, noop, _, _ = state.apply(U.U0)
    rec.add(U.U0, weight, noop)
    rec.begin("grow")
    run_increments(graph, state, rec, U.U0, U.increments, fast, target_order)
    info["seed_weight"] = weight
    return info


def solve_star_or_path(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    W: float | None = None,
    L: int | None = None,
    fast: bool = True,
    record_sets: bool = True,
    target_order: str = "nearest",
) -> SequenceTrace:
    """MST sequence for a spanning star or path via the run index and U-sequence.

    Raises when no run of ``L`` light edges exists; :func:`full_pipeline`
    falls back to a one-shot replacement instead.
    """
    lab = canonical_labeling(H)
    if lab.k < 4:
        raise InvalidParameter("need at least 4 vertices")
    if W is None or L is None:
        dW, dL = default_parameters(lab.k)
        W = dW if W is None else W
        L = dL if L is None else L
    run = run_index(graph, lab, W, L)
    if not run.found:
        raise InvalidParameter(f"no run of {L} edges of weight <= {W} (I = {run.I})")
    state = LocalState(graph, H)
    rec = TraceRecorder(record_sets)
    info = _solve_labeled(graph, state, rec, lab, W, L, fast, target_order)
    trace = rec.finish(graph, H, state.to_subgraph())
    trace.audit.update(info)
    return trace


def _bfs_from(state: LocalState, V0) -> list[int]:
    seen = set(V0)
    queue = sorted(seen)
    out = []
    head = 0
    while head < len(queue):
        x = queue[head]
        head += 1
        for y in sorted(state.adj[x]):
            if y not in seen:
                seen.add(y)
                out.append(y)
                queue.append(y)
    return out


def full_pipeline(
    graph: WeightedCompleteGraph,
    H: SpanningSubgraph,
    fast: bool = True,
    record_sets: bool = True,
    W: float | None = None,
    L: int | None = None,
    target_order: str = "nearest",
) -> SequenceTrace:
    """Witness, then solve the witness, then eat the rest of the graph.

    Phases: ``seed``/``grow`` (or ``cycles`` for a clique witness) on the
    witness, then ``eat`` for the remaining vertices in BFS order.
    """
    if H.n != graph.n:
        raise InvalidParameter("graph and subgraph sizes differ")
    if not H.is_connected():
        raise GraphError("H must be connected")
    witness = find_witness(H)
    state = LocalState(graph, H)
    rec = TraceRecorder(record_sets)
    info: dict = {"witness_kind": witness.kind, "witness_size": witness.size}
    V = list(witness.vertices)
    if witness.kind == "clique":
        rec.begin("cycles")
        _Engine(graph, state, rec, fast).cycles(set(V))
    else:
        info.update(_solve_labeled(graph, state, rec, Labeling.from_witness(witness), W, L, fast, target_order))
    rec.begin("eat")
    order = _bfs_from(state, V)
    if len(order) + len(V) != graph.n:
        raise GraphError("H became disconnected")
    run_increments(graph, state, rec, V, order, fast, target_order)
    trace = rec.finish(graph, H, state.to_subgraph())
    trace.audit.update(info)
    return trace


# -- Monte Carlo checks on the path labelling ---------------------------------


def _path_edge_indices(n: int) -> np.ndarray:
    i = np.arange(1, n, dtype=np.int64)
    return i * (i - 1) // 2 + (i - 1)


@dataclass
class TailReport:
    n: int
    W: float
    L: int
    trials: int
    grid: list[int]
    empirical: list[float]
    bound: list[float]
    sigma: list[float]
    violations: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("n", "W", "L", "trials", "grid", "empirical", "bound", "sigma", "violations")}


def sample_run_indices(
    n: int, W: float, L: int, trials: int, seed: int, dist: EdgeWeightDistribution = UNIFORM
) -> np.ndarray:
    """Run index of the canonical path ``1..n`` for each seeded trial graph.

    Only the path edges are drawn; they equal the corresponding weights of
    ``sample_graph(n, dist, trial_seed(seed, t))``.
    """
    idx = _path_edge_indices(n)
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        x = edge_weights(dist, trial_seed(seed, t), idx)
        out[t] = run_index_from_weights(x, W, L)
    return out


def run_index_tail_check(
    n: int, W: float, L: int, trials: int, seed: int = 0, grid: Sequence[int] | None = None, sigmas: float = 3.0
) -> TailReport:
    """Empirical ``P(I >= kL + 1)`` against ``exp(-k W^L)`` over a grid of ``k``."""
    I = sample_run_indices(n, W, L, trials, seed)
    kmax = (n - L - 1) // L
    if grid is None:
        grid = sorted(set(np.unique(np.linspace(0, kmax, 25).astype(int)).tolist()))
    emp, bnd, sig, bad = [], [], [], []
    for k in grid:
        p = float(np.mean(I >= k * L + 1))
        b = math.exp(-k * W**L)
        s = math.sqrt(b * (1 - b) / trials)
        emp.append(p)
        bnd.append(b)
        sig.append(s)
        if p > b + sigmas * s:
            bad.append(int(k))
    return TailReport(n, W, L, trials, list(map(int, grid)), emp, bnd, sig, bad)


def u_sequence_wdiams(graph: WeightedCompleteGraph, U: USequence) -> np.ndarray:
    """``wdiam(MST(G[U_i]))`` for every set of the sequence, grown incrementally."""
    return _fast.incremental_mst_wdiam(
        graph.matrix, np.asarray(U.U0, dtype=np.int64), np.asarray(U.increments, dtype=np.int64)
    )


@dataclass
class GoodSetsReport:
    n: int
    W: float
    L: int
    epsilon: float
    trials: int
    bad: int
    max_wdiam: list[float]

    @property
    def frequency(self) -> float:
        return self.bad / self.trials if self.trials else 0.0

    @property
    def sigma(self) -> float:
        p = self.frequency
        return math.sqrt(p * (1 - p) / self.trials) if self.trials else 0.0


def good_sets_scan(
    n: int, W: float | None, L: int | None, epsilon: float, trials: int, seed: int = 0,
    dist: EdgeWeightDistribution = UNIFORM,
) -> GoodSetsReport:
    """Frequency of some ``U`` in the U-sequence having ``wdiam(MST(G[U])) > epsilon``."""
    dW, dL = default_parameters(n)
    W = dW if W is None else W
    L = dL if L is None else L
    lab = Labeling("path", tuple(range(1, n + 1)))
    bad = 0
    worst = []
    for t in range(trials):
        g = sample_graph(n, dist, trial_seed(seed, t))
        run = run_index(g, lab, W, L)
        if run.found:
            U = u_sequence(run, lab)
        else:
            # the sequence is still defined when the cap is hit
            I = run.I
            sets = [lab.V(I, n)] + [lab.V(i, n) for i in range(I - 1, 0, -1)]
            U = USequence(sets, [s[0] for s in sets[1:]], 1, 0, I - 1)
        wd = u_sequence_wdiams(g, U)
        m = float(wd.max())
        worst.append(m)
        if m > epsilon:
            bad += 1
    return GoodSetsReport(n, W, L, epsilon, trials, bad, worst)


def wdiam_bound_audit(graph: WeightedCompleteGraph, trace: SequenceTrace, regions: Sequence[Sequence[int]]) -> float:
    """``max edge + max_i wdiam(MST(G[U_i]))`` over the given regions."""
    best = 0.0
    for R in regions:
        best = max(best, wdiam_of_edges(graph, induced_mst_edges(graph, R), R))
    return graph.max_weight() + best
