import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from localmst import (
    GraphError,
    InvalidParameter,
    Labeling,
    TruncatedExponential,
    Uniform,
    canonical_labeling,
    full_pipeline,
    good_sets_scan,
    make_fixed_graph,
    make_start_graph,
    mst,
    run_index,
    run_index_tail_check,
    sample_graph,
    solve_star_or_path,
    u_sequence,
)
from localmst.eating import induced_mst_wdiam
from localmst.graphs import edge_index, num_edges
from localmst.starpath import RunIndex, default_parameters, run_index_from_weights, u_sequence_wdiams
from localmst.search import check_persistence

SLACK = 1e-12
# path weights x_1..x_8 with the first run of three edges <= 0.2 starting at e_4
FIG_PATH = [0.5, 0.1, 0.3, 0.1, 0.15, 0.19, 0.6, 0.7]


def _fig_graph(seed=0):
    g = sample_graph(9, seed=seed)
    w = g.weights.copy()
    for i, x in enumerate(FIG_PATH, start=1):
        w[edge_index(i, i + 1)] = x
    return make_fixed_graph(9, w)


def test_canonical_path_is_identity():
    lab = canonical_labeling(make_start_graph("path", 7))
    assert lab.kind == "path" and lab.order == tuple(range(1, 8))
    assert lab.V(4, 7) == [4, 5, 6, 7]


def test_canonical_star_moves_center_last():
    lab = canonical_labeling(make_start_graph("explicit", 4, edges=[(1, 3), (2, 3), (3, 4)]))
    assert lab.kind == "star" and lab.order[-1] == 3
    assert [lab.edge(i) for i in range(1, 4)] == [(1, 3), (2, 3), (3, 4)]
    assert sorted(lab.V(1, 3)) == [1, 2, 3]


def test_canonical_rejects_other_trees():
    with pytest.raises(GraphError):
        canonical_labeling(make_start_graph("explicit", 6, edges=[(1, 2), (2, 3), (3, 4), (2, 5), (4, 6)]))
    with pytest.raises(GraphError):
        canonical_labeling(make_start_graph("clique", 4))


@given(st.integers(3, 30), st.data())
def test_V_sizes(k, data):
    i = data.draw(st.integers(1, k - 1))
    j = data.draw(st.integers(i + 1, k))
    for kind in ("path", "star"):
        V = Labeling(kind, tuple(range(1, k + 1))).V(i, j)
        assert len(V) == j - i + 1


def test_run_index_figure_example():
    g = _fig_graph()
    lab = canonical_labeling(make_start_graph("path", 9))
    assert run_index(g, lab, 0.2, 3).I == 4
    U = u_sequence(run_index(g, lab, 0.2, 3), lab)
    assert sorted(U.U0) == [4, 5, 6, 7]
    assert U.increments == [8, 9, 3, 2, 1]


def test_run_index_extremes():
    assert run_index_from_weights(np.full(9, 0.1), 0.2, 3) == 1
    assert run_index_from_weights(np.full(9, 0.9), 0.2, 3) == 10 - 3
    # run ending on the last edge
    assert run_index_from_weights(np.array([0.9] * 6 + [0.1] * 3), 0.2, 3) == 7
    with pytest.raises(InvalidParameter):
        run_index_from_weights(np.full(4, 0.1), 0.2, 4)


@given(st.lists(st.floats(0.0, 1.0), min_size=4, max_size=40), st.floats(0.05, 0.95), st.integers(2, 5))
def test_run_index_matches_definition(x, W, L):
    k = len(x) + 1
    if not L < k - 1:
        return
    direct = min([i for i in range(1, k - L + 1) if all(x[j - 1] <= W for j in range(i, i + L))], default=k - L)
    assert run_index_from_weights(np.array(x), W, L) == min(k - L, direct)


def test_u_sequence_counting():
    lab = Labeling("path", tuple(range(1, 10)))
    for I in range(1, 6):
        U = u_sequence(RunIndex(0.2, 3, I, 9), lab)
        assert [len(s) for s in U.sets] == [3 + 1 + i for i in range(9 - 3)]
        assert all(set(a) < set(b) for a, b in zip(U.sets, U.sets[1:]))
    only_right = u_sequence(RunIndex(0.2, 3, 1, 9), lab)
    assert only_right.increments == [5, 6, 7, 8, 9] and only_right.left == 0
    with pytest.raises(InvalidParameter):
        u_sequence(RunIndex(0.2, 3, 6, 9), lab)


def test_u_sequence_regions_connected():
    for kind in ("path", "star"):
        H = make_start_graph(kind, 12)
        lab = canonical_labeling(H)
        for I in range(1, 9):
            U = u_sequence(RunIndex(0.2, 3, I, 12), lab)
            for s in U.sets:
                assert H.is_connected(s)


def test_default_parameters():
    W, L = default_parameters(10**4)
    assert W == 1 / math.log(10**4) and L == math.floor(math.log(math.log(10**4))) == 2
    assert default_parameters(10)[1] == 2


@pytest.mark.parametrize("kind", ["path", "star"])
@pytest.mark.parametrize("seed", range(6))
def test_solve_star_or_path_n100(kind, seed):
    n = 100
    g = sample_graph(n, seed=seed)
    H = make_start_graph(kind, n)
    W, L = default_parameters(n)
    lab = canonical_labeling(H)
    run = run_index(g, lab, W, L)
    if not run.found:
        with pytest.raises(InvalidParameter):
            solve_star_or_path(g, H, W, L)
        return
    tr = solve_star_or_path(g, H, W, L)
    assert tr.reached_mst and check_persistence(tr, g).ok
    assert tr.step_weights[0] <= W * L + SLACK
    U = u_sequence(run, lab)
    bound = max(W * L, g.rho_star + float(u_sequence_wdiams(g, U).max()))
    assert tr.wt_max <= bound + SLACK


def test_solve_figure_instance():
    for seed in range(5):
        g = _fig_graph(seed)
        tr = solve_star_or_path(g, make_start_graph("path", 9), 0.2, 3)
        assert tr.reached_mst and tr.final == mst(g)
        assert tr.step_weights[0] <= 0.6 + SLACK


def test_solve_all_light():
    g = make_fixed_graph(6, np.linspace(0.01, 0.1, num_edges(6)))
    tr = solve_star_or_path(g, make_start_graph("path", 6), 0.5, 2)
    assert tr.reached_mst


def test_u_sequence_wdiams_match_direct():
    g = sample_graph(40, seed=3)
    lab = canonical_labeling(make_start_graph("path", 40))
    U = u_sequence(RunIndex(0.3, 2, 7, 40), lab)
    fast = u_sequence_wdiams(g, U)
    direct = [induced_mst_wdiam(g, s) for s in U.sets]
    assert np.allclose(fast, direct, rtol=1e-12, atol=1e-12)


def test_pipeline_on_mst():
    g = sample_graph(30, seed=2)
    tr = full_pipeline(g, mst(g))
    assert tr.reached_mst and tr.final == mst(g)


def test_pipeline_clique_n40():
    g = sample_graph(40, seed=5)
    tr = full_pipeline(g, make_start_graph("clique", 40))
    assert tr.reached_mst and tr.audit["witness_kind"] == "clique"
    assert tr.wt_max <= 1 + induced_mst_wdiam(g, range(1, 41)) + SLACK


def test_pipeline_random_trees_n100():
    wt = []
    for seed in range(100):
        g = sample_graph(100, seed=seed)
        tr = full_pipeline(g, make_start_graph("random_tree", 100, seed=seed + 1000), record_sets=False)
        assert tr.reached_mst
        wt.append(tr.wt_max)
    assert np.isfinite(np.percentile(wt, 90))


@pytest.mark.parametrize("kind", ["path", "star", "clique", "random_tree"])
def test_pipeline_max_of_phases(kind):
    g = sample_graph(60, seed=7)
    tr = full_pipeline(g, make_start_graph(kind, 60, seed=3))
    names = {p[0] for p in tr.phases}
    assert tr.wt_max == max(tr.phase_wt(x) for x in names)
    assert check_persistence(tr, g).ok


@pytest.mark.parametrize("order", ["nearest", "label"])
def test_pipeline_routes_agree(order):
    for seed in range(4):
        g = sample_graph(30, seed=seed)
        H = make_start_graph("random_tree", 30, seed=seed)
        a = full_pipeline(g, H, fast=False, target_order=order)
        b = full_pipeline(g, H, fast=True, target_order=order)
        assert a.sets == b.sets and a.final == b.final
        assert np.allclose(a.step_weights, b.step_weights, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("dist", [Uniform(0.5), TruncatedExponential(3.0, 2.0)], ids=lambda d: d.spec)
def test_pipeline_general_distributions(dist):
    g = sample_graph(80, dist, 4)
    tr = full_pipeline(g, make_start_graph("path", 80))
    assert tr.reached_mst


def test_pipeline_fallback_is_one_shot():
    # every path edge heavy: no run, so the witness is replaced in one step
    n = 12
    w = np.full(num_edges(n), 0.05)
    for i in range(1, n):
        w[edge_index(i, i + 1)] = 0.9
    g = make_fixed_graph(n, w)
    tr = full_pipeline(g, make_start_graph("path", n))
    assert tr.audit["fallback"] and tr.reached_mst
    assert abs(tr.step_weights[0] - 0.9 * (n - 1)) < 1e-9


def test_pipeline_rejects_disconnected():
    from localmst.graphs import SpanningSubgraph

    with pytest.raises(GraphError):
        full_pipeline(sample_graph(4, seed=0), SpanningSubgraph.from_pairs(4, [(1, 2), (3, 4)]))


def test_tail_check_trivial_cases():
    rep = run_index_tail_check(200, 0.999999, 2, 200, seed=1, grid=[0, 1, 5])
    assert rep.empirical == [1.0, 0.0, 0.0] and rep.ok
    assert rep.bound[0] == 1.0


def test_tail_check_moderate():
    rep = run_index_tail_check(2000, *default_parameters(2000), trials=2000, seed=2)
    assert rep.ok


def test_good_sets_trivial():
    assert good_sets_scan(60, None, None, 60.0, 5, seed=1).frequency == 0.0
    assert good_sets_scan(60, None, None, 1e-9, 5, seed=1).frequency == 1.0
