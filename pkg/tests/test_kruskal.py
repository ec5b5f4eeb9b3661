import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmst import (
    UNIFORM,
    GraphError,
    InvalidParameter,
    alpha,
    check_reduced_mst_bound,
    connectivity_probability_bound,
    kruskal_trace,
    make_fixed_graph,
    mst,
    sample_graph,
    snapshot,
    snapshot_at,
)
from localmst.graphs import edge_endpoints, edge_index
from localmst.kruskal import (
    critical_p,
    disconnection_frequency,
    gnp_connected,
    induced_mst_edges,
    mst_edges,
)
from localmst.trees import TreeView, wdiam

from oracles import brute_force_mst, scipy_components, scipy_forest


def test_triangle_mst(triangle):
    assert mst(triangle).pairs() == [(1, 2), (2, 3)]


def test_two_vertices():
    assert mst(make_fixed_graph(2, [0.7])).pairs() == [(1, 2)]


def test_brute_force_n8():
    g = sample_graph(8, UNIFORM, 2024)
    assert set(mst_edges(g).tolist()) == brute_force_mst(g)


@pytest.mark.parametrize("seed", range(5))
def test_against_networkx(seed):
    g = sample_graph(40, UNIFORM, seed)
    G = nx.Graph()
    for e, w in enumerate(g.weights):
        G.add_edge(*edge_endpoints(e), weight=float(w))
    ref = {edge_index(u, v) for u, v in nx.minimum_spanning_edges(G, algorithm="prim", data=False)}
    assert set(mst_edges(g).tolist()) == ref


def test_cycle_property_certificate():
    g = sample_graph(30, UNIFORM, 8)
    tree = TreeView(g, mst_edges(g).tolist())
    in_tree = set(mst_edges(g).tolist())
    for e in range(len(g.weights)):
        if e in in_tree:
            continue
        u, v = edge_endpoints(e)
        _, _, parent = tree.distances(u)
        x, heaviest = v, 0.0
        while x != u:
            heaviest = max(heaviest, g.weight(x, parent[x]))
            x = parent[x]
        assert g.weights[e] > heaviest


@given(st.integers(0, 2**31), st.sampled_from(["square", "exp", "affine"]))
def test_mst_invariant_under_increasing_transform(seed, kind):
    g = sample_graph(15, UNIFORM, seed)
    f = {"square": lambda w: w**2, "exp": np.exp, "affine": lambda w: 3 * w + 1}[kind]
    h = make_fixed_graph(15, f(g.weights))
    assert set(mst_edges(g).tolist()) == set(mst_edges(h).tolist())


def test_induced_mst_matches_relabelled_graph():
    g = sample_graph(20, UNIFORM, 4)
    vs = [2, 5, 7, 11, 12, 19]
    sub = induced_mst_edges(g, vs)
    ref = scipy_forest(20, g.weights, g.induced_sorted_edges(vs))
    assert set(sub) == ref


def test_trace_triangle(triangle):
    tr = kruskal_trace(triangle)
    assert tr.accepted.tolist() == [True, True, False]
    assert tr.check() == []


@pytest.mark.parametrize("seed", range(3))
def test_trace_coupling_n20(seed):
    g = sample_graph(20, UNIFORM, seed)
    tr = kruskal_trace(g)
    assert tr.check() == []
    order = tr.sorted_edges.tolist()
    for i in range(1, tr.N + 1):
        prefix = order[:i]
        forest = set(tr.forest_edges(i).tolist())
        assert scipy_components(20, forest) == scipy_components(20, prefix)
        assert forest == scipy_forest(20, g.weights, prefix)
        assert frozenset(map(frozenset, tr.components(i))) == scipy_components(20, prefix)


def test_trace_m_of_p():
    g = sample_graph(30, UNIFORM, 1)
    tr = kruskal_trace(g)
    for p in (0.0, 0.01, 0.2, 1.0):
        assert tr.m(p) == int(np.sum(g.weights <= p))


def test_snapshot_extremes():
    g = sample_graph(50, UNIFORM, 3)
    full = snapshot(g, 1.0)
    assert len(full.t_max) == 50 and full.L_np == 0 and full.runner_up_size == 0
    empty = snapshot(g, 0.0)
    assert len(empty.t_max) == 1 and empty.t_max == [1]
    with pytest.raises(InvalidParameter):
        snapshot(g, -0.1)


@pytest.mark.parametrize("seed", range(4))
def test_snapshot_invariants(seed):
    g = sample_graph(120, UNIFORM, seed)
    tr = kruskal_trace(g)
    p = 1.3 / 120
    s = snapshot_at(tr, p)
    assert s.runner_up_size <= len(s.t_max)
    assert all(g.weights[e] <= p for e in s.t_max_edges)
    assert len(s.t_max_edges) == len(s.t_max) - 1
    in_t = set(s.t_max)
    for e in mst_edges(g).tolist():
        a, b = edge_endpoints(e)
        if (a in in_t) != (b in in_t):
            assert g.weights[e] > p
    assert s.m_p == int(np.sum(g.weights <= p))


def _brute_L_np(g, t_max):
    """Longest MST path (in edges) with exactly one vertex in t_max, by DFS from every vertex."""
    tree = TreeView(g, mst_edges(g).tolist())
    inside = set(t_max)
    best = 0
    for s in range(1, g.n + 1):
        stack = [(s, 0, 0, int(s in inside))]
        while stack:
            x, par, d, k = stack.pop()
            if k == 1:
                best = max(best, d)
            for y, _ in tree.adj[x]:
                if y != par:
                    k2 = k + (y in inside)
                    if k2 <= 1:
                        stack.append((y, x, d + 1, k2))
    return best


@pytest.mark.parametrize("seed", range(4))
def test_L_np_brute_force(seed):
    g = sample_graph(60, UNIFORM, seed)
    s = snapshot(g, 1.5 / 60)
    assert s.L_np == _brute_L_np(g, s.t_max)


def test_mst_upper_inequality_n200():
    for seed in range(5):
        g = sample_graph(200, UNIFORM, seed)
        s = snapshot(g, critical_p(200))
        assert wdiam(TreeView(g, mst_edges(g).tolist())) <= s.mst_upper_bound()


def test_alpha_values():
    assert alpha(1.0) == 0.0
    assert alpha(0.3) == 0.0
    assert abs(alpha(2.0) - 0.7968121300200199) < 1e-10
    x = alpha(2.0)
    assert abs(math.exp(-2 * x) - (1 - x)) < 1e-11
    with pytest.raises(InvalidParameter):
        alpha(0.0)


@given(st.floats(1e-4, 1e-2))
def test_alpha_bracket(eps):
    a = alpha(1 + eps)
    assert 1.5 * eps <= a <= 2 * eps


@given(st.floats(0.01, 10), st.floats(0.01, 10))
def test_alpha_monotone(a, b):
    lo, hi = sorted((a, b))
    assert alpha(lo) <= alpha(hi) + 1e-11


def test_reduced_mst_identity(triangle):
    r = check_reduced_mst_bound(triangle, [edge_index(1, 2)], {})
    assert r.holds


def test_reduced_mst_triangle(triangle):
    r = check_reduced_mst_bound(triangle, [edge_index(1, 2)], {edge_index(1, 2): 0.01})
    assert r.subtree_case and r.holds
    # MST stays {12, 23}: wdiam = 0.01 + 0.3
    assert abs(r.lhs - 0.31) < 1e-15


def test_reduced_mst_errors(triangle):
    with pytest.raises(InvalidParameter):
        check_reduced_mst_bound(triangle, [edge_index(1, 2)], {edge_index(1, 2): 0.2})
    with pytest.raises(InvalidParameter):
        check_reduced_mst_bound(triangle, [edge_index(1, 2)], {edge_index(2, 3): 0.01})
    with pytest.raises(GraphError):
        check_reduced_mst_bound(triangle, [0, 1, 2], {})


def test_connectivity_bound_values():
    assert abs(connectivity_probability_bound(100, 0.15) - (math.exp(100 * math.exp(-7.5)) - 1)) < 1e-15
    assert abs(connectivity_probability_bound(100, 0.15) - 0.0569) < 5e-4
    assert connectivity_probability_bound(10, 1.0) > 0
    assert disconnection_frequency(10, 1.0, 20, 0) == 0.0


def test_connectivity_bound_against_sampling():
    f = disconnection_frequency(100, 0.15, 2000, 7)
    assert f <= connectivity_probability_bound(100, 0.15)


def test_gnp_connected_matches_scipy():
    from localmst.graphs import edge_uniforms

    for s in range(20):
        u = edge_uniforms(s, np.arange(45))
        comps = scipy_components(10, np.flatnonzero(u <= 0.25).tolist())
        assert gnp_connected(10, 0.25, s) == (len(comps) == 1)
