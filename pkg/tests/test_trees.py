import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmst import GraphError, InvalidParameter, TreeView, diam, make_fixed_graph, make_start_graph, sample_graph, tree_path, wdiam
from localmst.graphs import edge_index

from oracles import all_pairs_tree_diam, all_pairs_tree_wdiam


def _view(g, H):
    return TreeView.from_subgraph(g, H)


def test_single_edge():
    g = make_fixed_graph(2, [0.7])
    assert wdiam(TreeView(g, [0])) == 0.7
    assert diam(TreeView(g, [0])) == 1


def test_two_edge_path():
    g = make_fixed_graph(3, [0.2, 0.9, 0.3])  # w(12)=0.2, w(13)=0.9, w(23)=0.3
    t = TreeView(g, [edge_index(1, 2), edge_index(2, 3)])
    assert abs(wdiam(t) - 0.5) < 1e-15


def test_star_and_path_diameters():
    g = sample_graph(9, seed=1)
    assert diam(_view(g, make_start_graph("star", 9))) == 2
    assert diam(_view(g, make_start_graph("path", 9))) == 8


def test_paths():
    g = sample_graph(6, seed=1)
    path = _view(g, make_start_graph("path", 6))
    assert tree_path(path, 1, 4) == [1, 2, 3, 4]
    star = _view(g, make_start_graph("star", 6))
    assert tree_path(star, 2, 5) == [2, 6, 5]
    with pytest.raises(InvalidParameter):
        tree_path(path, 3, 3)


def test_not_a_tree():
    g = sample_graph(4, seed=1)
    with pytest.raises(GraphError):
        TreeView(g, [0, 1, 2])  # triangle on {1,2,3}
    with pytest.raises(GraphError):
        TreeView(g, [0], vertices=[1, 2, 3])


@given(st.integers(2, 64), st.integers(0, 2**31))
def test_double_sweep_matches_all_pairs(n, seed):
    g = sample_graph(n, seed=seed)
    t = _view(g, make_start_graph("random_tree", n, seed=seed + 1))
    assert abs(wdiam(t) - all_pairs_tree_wdiam(n, t.adj)) <= 1e-12
    assert diam(t) == all_pairs_tree_diam(t.adj)


@given(st.integers(3, 40), st.integers(0, 2**31))
def test_wdiam_between_hop_bounds(n, seed):
    g = sample_graph(n, seed=seed)
    H = make_start_graph("random_tree", n, seed=seed)
    ws = [g.weights[e] for e in H.edges]
    t = _view(g, H)
    d = diam(t)
    assert d * min(ws) - 1e-12 <= wdiam(t) <= d * max(ws) + 1e-12


@given(st.integers(3, 30), st.integers(0, 2**31), st.data())
def test_tree_path_reversal(n, seed, data):
    g = sample_graph(n, seed=seed)
    t = _view(g, make_start_graph("random_tree", n, seed=seed))
    u = data.draw(st.integers(1, n))
    v = data.draw(st.integers(1, n).filter(lambda x: x != u))
    p = tree_path(t, u, v)
    assert p[0] == u and p[-1] == v
    assert tree_path(t, v, u) == p[::-1]
