import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from homolink import (Graph, InputError, bfs_sample, build_graph, common_neighbors,
                      local_clustering, local_clustering_all)
from homolink.graph import induced_subgraph, triangle_count
from synthetic import random_graph


def labeled(g, ids):
    return [g.labels[i] for i in ids]


def test_build_drops_duplicates_and_self_loops():
    g = build_graph([("a", "b"), ("b", "a"), ("b", "b")])
    assert (g.node_count, g.edge_count) == (2, 1)
    assert g.build_stats.duplicates == 1
    assert g.build_stats.self_loops == 1


def test_build_path_degrees():
    g = build_graph([(1, 2), (2, 3)])
    assert {lab: g.degree(g.node_id(lab)) for lab in (1, 2, 3)} == {1: 1, 2: 2, 3: 1}


def test_build_empty_raises():
    with pytest.raises(InputError, match="empty graph"):
        build_graph([])


def test_numeric_labels_sort_numerically():
    g = build_graph([("10", "9"), ("2", "10")])
    assert g.labels == ["2", "9", "10"]


def test_label_order_independent_of_input_order():
    assert build_graph([("2", "02")]).labels == build_graph([("02", "2")]).labels == ["02", "2"]


def test_directed_reciprocal_collapse():
    g = build_graph([(1, 2), (2, 1), (2, 3)], directed_input=True)
    assert g.edge_count == 2
    assert g.build_stats.reciprocal == 1


def test_duplicate_keeps_earliest_timestamp():
    g = build_graph([(1, 2), (2, 1)], timestamps=[7, 3])
    assert g.timestamps.tolist() == [3]


def test_arrays_are_read_only():
    g = build_graph([(1, 2), (2, 3)])
    with pytest.raises(ValueError):
        g.indices[0] = 5


@pytest.mark.parametrize("edges, q, expected", [
    ([("a", "b"), ("b", "c"), ("a", "c")], ("a", "b"), ["c"]),
    ([("a", "b"), ("b", "c")], ("a", "c"), ["b"]),
    ([("h", "x"), ("h", "y")], ("x", "y"), ["h"]),
])
def test_common_neighbors_examples(edges, q, expected):
    g = build_graph(edges)
    got = common_neighbors(g, g.node_id(q[0]), g.node_id(q[1]))
    assert labeled(g, got) == expected


def test_common_neighbors_range_error():
    g = build_graph([(1, 2)])
    with pytest.raises(IndexError):
        common_neighbors(g, 0, 5)


def test_local_clustering_examples():
    tri = build_graph([(1, 2), (2, 3), (1, 3)])
    assert local_clustering(tri, 0) == 1.0
    path = build_graph([(1, 2), (2, 3)])
    assert local_clustering(path, path.node_id(2)) == 0.0
    # 4-cycle 1-2-3-4 with chord 1-3
    g = build_graph([(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])
    A = oracles.adjacency(g)
    for lab in (1, 3):
        i = g.node_id(lab)
        assert local_clustering(g, i) == oracles.local_cc(A, i) == 2 / 3


def test_complete_and_tree_clustering():
    n = 6
    iu, ju = np.triu_indices(n, 1)
    k6 = Graph.from_edge_array(n, np.stack([iu, ju], 1))
    assert np.all(local_clustering_all(k6) == 1.0)
    tree = Graph.from_edge_array(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
    assert np.all(local_clustering_all(tree) == 0.0)


def test_bfs_examples():
    star = build_graph([(0, 1), (0, 2), (0, 3), (0, 4)])
    s = bfs_sample(star, star.node_id(0), 3)
    assert s.labels == [0, 1, 2]
    assert s.edge_count == 2
    path = build_graph([("a", "b"), ("b", "c"), ("c", "d")])
    s = bfs_sample(path, path.node_id("a"), 2)
    assert s.labels == ["a", "b"] and s.edge_count == 1


def test_bfs_exhausts_component():
    g = build_graph([(1, 2), (2, 3), (4, 5)])
    s = bfs_sample(g, g.node_id(1), 100)
    assert s.labels == [1, 2, 3] and s.edge_count == 2


def test_bfs_errors():
    g = build_graph([(1, 2)])
    with pytest.raises(IndexError):
        bfs_sample(g, 9, 2)
    with pytest.raises(InputError):
        bfs_sample(g, 0, 0)


graphs = st.builds(lambda n, p, seed: random_graph(n, p, np.random.default_rng(seed)),
                   st.integers(2, 25), st.floats(0.0, 1.0), st.integers(0, 2**32 - 1))


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_graph_invariants(g):
    deg = g.degrees
    assert deg.sum() == 2 * g.edge_count
    for i in range(g.node_count):
        nb = g.neighbors(i)
        assert np.all(np.diff(nb) > 0)
        assert i not in nb.tolist()
        for j in nb.tolist():
            assert g.has_edge(j, i)


@settings(max_examples=60, deadline=None)
@given(graphs)
def test_clustering_matches_enumeration(g):
    A = oracles.adjacency(g)
    cc = local_clustering_all(g)
    for i in range(g.node_count):
        assert cc[i] == oracles.local_cc(A, i) == local_clustering(g, i)
    tri = sum(1 for a in range(len(A)) for b in range(a + 1, len(A)) for c in range(b + 1, len(A))
              if A[a][b] and A[b][c] and A[a][c])
    assert triangle_count(g) == tri


@settings(max_examples=40, deadline=None)
@given(graphs, st.data())
def test_common_neighbors_symmetric(g, data):
    u = data.draw(st.integers(0, g.node_count - 1))
    v = data.draw(st.integers(0, g.node_count - 1).filter(lambda x: x != u))
    assert common_neighbors(g, u, v) == common_neighbors(g, v, u)


@settings(max_examples=40, deadline=None)
@given(graphs, st.data())
def test_bfs_sample_is_induced(g, data):
    start = data.draw(st.integers(0, g.node_count - 1))
    k = data.draw(st.integers(1, g.node_count))
    s = bfs_sample(g, start, k)
    assert s.node_count <= k
    assert s.degrees.sum() == 2 * s.edge_count
    ids = [g.node_id(lab) for lab in s.labels]
    for u, v in s.edges.tolist():
        assert g.has_edge(ids[u], ids[v])
    sub = induced_subgraph(g, ids)
    assert sub.edge_count == s.edge_count
