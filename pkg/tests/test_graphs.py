import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmst import (
    UNIFORM,
    GraphError,
    InvalidParameter,
    PiecewiseLinear,
    TruncatedExponential,
    Uniform,
    edge_endpoints,
    edge_index,
    load_graph,
    make_fixed_graph,
    make_start_graph,
    parse_distribution,
    sample_graph,
    save_graph,
)
from localmst.errors import DistributionError
from localmst.graphs import SpanningSubgraph, num_edges, prufer_decode
from localmst.seeds import trial_seed

DISTS = [Uniform(), Uniform(0.5), TruncatedExponential(2.0, 1.5), PiecewiseLinear([(0.0, 2.0), (0.5, 1.0), (1.0, 0.0)])]


@given(st.integers(2, 300).flatmap(lambda v: st.tuples(st.integers(1, v - 1), st.just(v))))
def test_edge_index_round_trip(uv):
    u, v = uv
    e = edge_index(u, v)
    assert edge_endpoints(e) == (u, v)
    assert edge_index(v, u) == e


def test_edge_index_is_a_bijection():
    n = 12
    idx = sorted(edge_index(u, v) for v in range(2, n + 1) for u in range(1, v))
    assert idx == list(range(num_edges(n)))


def test_edge_index_formula():
    assert edge_index(1, 2) == 0
    assert edge_index(1, 3) == 1
    assert edge_index(2, 3) == 2
    assert edge_index(3, 7) == 6 * 5 // 2 + 2


@pytest.mark.parametrize("dist", DISTS, ids=lambda d: d.spec)
def test_inverse_cdf_round_trip(dist):
    xs = np.linspace(0.0, dist.rho_star, 201)[1:-1]
    back = dist.inverse_cdf(dist.cdf(xs))
    assert np.max(np.abs(back - xs)) < 1e-12 * max(1.0, dist.rho_star) * 10


@pytest.mark.parametrize("dist", DISTS, ids=lambda d: d.spec)
def test_spec_round_trip(dist):
    assert parse_distribution(dist.spec) == dist


def test_uniform_constants():
    assert UNIFORM.rho_star == 1.0
    assert UNIFORM.density_at_zero == 1.0
    assert Uniform(0.5).density_at_zero == 2.0


def test_bad_distributions():
    with pytest.raises(DistributionError):
        parse_distribution("gamma:2")
    with pytest.raises((DistributionError, InvalidParameter)):
        parse_distribution("uniform:-1")
    with pytest.raises((DistributionError, InvalidParameter)):
        PiecewiseLinear([(0.0, 0.0), (1.0, 2.0)])  # f(0) must be positive


def test_sample_graph_n2():
    g = sample_graph(2, UNIFORM, 7)
    assert g.weights.shape == (1,)
    assert 0 < g.weights[0] < 1


def test_sample_graph_deterministic():
    a = sample_graph(4, UNIFORM, 99)
    b = sample_graph(4, UNIFORM, 99)
    assert a.weights.tobytes() == b.weights.tobytes()
    assert sample_graph(4, UNIFORM, 100).weights.tobytes() != a.weights.tobytes()


def test_sample_graph_prefix_consistency():
    # counter-based draws: the graph on [m] is the restriction of the graph on [n]
    small = sample_graph(10, UNIFORM, 5)
    big = sample_graph(30, UNIFORM, 5)
    assert np.array_equal(small.weights, big.weights[: num_edges(10)])


def test_sample_graph_rejects_small_n():
    with pytest.raises(InvalidParameter):
        sample_graph(1, UNIFORM, 0)


def test_sample_mean_and_cdf():
    ws = np.concatenate([sample_graph(100, UNIFORM, trial_seed(3, t)).weights for t in range(200)])
    assert abs(ws.mean() - 0.5) < 0.02
    assert abs(np.mean(ws <= 0.5) - 0.5) < 0.01


@pytest.mark.parametrize("dist", DISTS, ids=lambda d: d.spec)
def test_weights_in_support_and_strict_order(dist):
    g = sample_graph(60, dist, 11)
    assert np.all(g.weights > 0) and np.all(g.weights <= dist.rho_star)
    order = g.sorted_edges()
    keys = [g.key(int(e)) for e in order]
    assert all(a < b for a, b in zip(keys, keys[1:]))


def test_truncated_exponential_mean():
    d = TruncatedExponential(2.0, 1.0)
    ws = sample_graph(200, d, 1).weights
    assert abs(ws.mean() - d.mean()) < 0.01


def test_fixed_graph_triangle(triangle):
    assert triangle.weight(1, 2) == 0.1
    assert triangle.weight(1, 3) == 0.5
    assert triangle.weight(2, 3) == 0.3
    assert make_fixed_graph(2, [0.7]).weight(1, 2) == 0.7


def test_fixed_graph_errors():
    with pytest.raises(InvalidParameter):
        make_fixed_graph(3, [0.1, 0.5])
    with pytest.raises(InvalidParameter):
        make_fixed_graph(3, [0.1, 0.0, 0.3])


def test_graph_file_round_trip(tmp_path):
    g = sample_graph(7, UNIFORM, 3)
    path = tmp_path / "g.txt"
    save_graph(g, path)
    h = load_graph(path)
    assert np.array_equal(g.weights, h.weights)


def test_graph_file_errors(tmp_path):
    path = tmp_path / "g.txt"
    path.write_text("3\n1 2 0.1\n1 3 0.5\n")
    with pytest.raises(GraphError):
        load_graph(path)
    path.write_text("3\n1 2 0.1\n2 1 0.5\n2 3 0.3\n")
    with pytest.raises(GraphError):
        load_graph(path)


def test_start_graphs():
    assert make_start_graph("path", 4).pairs() == [(1, 2), (2, 3), (3, 4)]
    assert make_start_graph("star", 4).pairs() == [(1, 4), (2, 4), (3, 4)]
    assert len(make_start_graph("clique", 5)) == 10
    t = make_start_graph("random_tree", 6, seed=4)
    assert len(t) == 5 and t.is_spanning_tree()


def test_explicit_start_graph():
    H = make_start_graph("explicit", 4, edges=[(1, 2), (2, 3), (3, 4), (1, 4)])
    assert H.is_connected() and not H.is_spanning_tree()
    with pytest.raises(GraphError):
        make_start_graph("explicit", 4, edges=[(1, 2), (3, 4)])
    with pytest.raises(GraphError):
        make_start_graph("explicit", 4, edges=[(1, 5)])


@given(st.integers(3, 40), st.integers(0, 2**32))
def test_random_tree_is_spanning_tree(n, seed):
    assert make_start_graph("random_tree", n, seed=seed).is_spanning_tree()


def test_prufer_known_value():
    # classic example: sequence (4, 4, 4, 5) on 6 vertices
    assert sorted(prufer_decode([4, 4, 4, 5], 6)) == [(1, 4), (2, 4), (3, 4), (4, 5), (5, 6)]


def test_prufer_is_uniform_on_small_n():
    # Cayley: 16 labelled trees on 4 vertices, each should appear about 1/16 of the time
    counts = {}
    for s in range(3200):
        t = tuple(make_start_graph("random_tree", 4, seed=s).pairs())
        counts[t] = counts.get(t, 0) + 1
    assert len(counts) == 16
    assert all(abs(c / 3200 - 1 / 16) < 0.025 for c in counts.values())


def test_subgraph_predicates():
    H = SpanningSubgraph.from_pairs(4, [(1, 2), (3, 4)])
    assert not H.is_connected()
    assert H.with_edges(add=[edge_index(2, 3)]).is_spanning_tree()
    with pytest.raises(GraphError):
        SpanningSubgraph(3, frozenset({3}))
