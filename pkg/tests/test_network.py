import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mzopinion.network import (from_edges, load_edge_list, make_clustered, make_complete,
                               save_edge_list)


def test_complete_single_node():
    net = make_complete(1)
    assert net.neighbors(0).tolist() == [0]


def test_complete_small_degrees():
    assert make_complete(3).degree.tolist() == [3, 3, 3]


def test_complete_large():
    net = make_complete(5000)
    assert np.all(net.degree == 5000)
    assert net.cluster_of is None
    assert net.neighbors(4999).size == 5000


def test_complete_rejects_zero():
    with pytest.raises(ValueError):
        make_complete(0)


def test_clustered_zero_coupling_is_two_blocks():
    adj = make_clustered(4, 2, 0.0).to_dense()
    expected = np.zeros((4, 4), bool)
    expected[:2, :2] = expected[2:, 2:] = True
    assert np.array_equal(adj, expected)


def test_clustered_full_coupling_is_complete():
    assert make_clustered(4, 2, 1.0).same_as(make_complete(4))


@pytest.mark.parametrize("n,k", [(12, 3), (30, 5), (8, 8)])
def test_full_coupling_equals_complete(n, k):
    assert np.array_equal(make_clustered(n, k, 1.0, rng_seed=3).to_dense(),
                          make_complete(n).to_dense())


def test_clustered_rejects_uneven_split():
    with pytest.raises(ValueError):
        make_clustered(10, 3, 0.1)


def test_clustered_rejects_bad_probability():
    with pytest.raises(ValueError):
        make_clustered(10, 2, 1.5)


def test_inter_cluster_edge_count_within_4_sigma():
    net = make_clustered(5000, 2, 1e-4, rng_seed=0)
    n_pairs = 2500 * 2500
    mean = n_pairs * 1e-4
    sd = np.sqrt(n_pairs * 1e-4 * (1 - 1e-4))
    assert abs(net.n_extra_edges - mean) <= 4 * sd


def test_clustered_is_deterministic_given_seed():
    a = make_clustered(600, 3, 0.01, rng_seed=7)
    b = make_clustered(600, 3, 0.01, rng_seed=7)
    c = make_clustered(600, 3, 0.01, rng_seed=8)
    assert a.same_as(b)
    assert not a.same_as(c)


def test_chunking_does_not_change_network():
    a = make_clustered(300, 3, 0.05, rng_seed=2, chunk_rows=7)
    b = make_clustered(300, 3, 0.05, rng_seed=2, chunk_rows=512)
    assert a.same_as(b)


def test_clusters_are_contiguous():
    net = make_clustered(10, 5, 0.0)
    assert net.cluster_of.tolist() == [0, 0, 1, 1, 2, 2, 3, 3, 4, 4]


@settings(max_examples=40, deadline=None)
@given(n_per=st.integers(1, 20), k=st.integers(1, 6), p=st.floats(0, 1), seed=st.integers(0, 10**6))
def test_generated_networks_are_symmetric_with_self_loops(n_per, k, p, seed):
    net = make_clustered(n_per * k, k, p, rng_seed=seed)
    adj = net.to_dense()
    assert np.array_equal(adj, adj.T)
    assert adj.diagonal().all()
    assert np.array_equal(adj.sum(axis=1), net.degree)
    for i in range(net.n_agents):
        assert np.array_equal(np.flatnonzero(adj[i]), net.neighbors(i))


def test_symmetry_sampled_on_large_network():
    net = make_clustered(5000, 5, 1e-3, rng_seed=1)
    rng = np.random.default_rng(0)
    for i in rng.integers(0, 5000, 50):
        for j in net.neighbors(i):
            assert i in net.neighbors(j)


def test_edge_list_round_trip(tmp_path):
    net = make_clustered(40, 4, 0.2, rng_seed=5)
    path = tmp_path / "edges.txt"
    save_edge_list(net, path)
    first = path.read_text().splitlines()[1].split()
    assert int(first[0]) >= 1
    back = load_edge_list(path)
    assert back.same_as(net)


def test_from_edges_adds_self_loops_and_symmetry():
    net = from_edges(3, [(0, 1), (2, 1), (1, 1)])
    assert net.neighbors(0).tolist() == [0, 1]
    assert net.neighbors(1).tolist() == [0, 1, 2]
    assert net.neighbors(2).tolist() == [1, 2]


def test_from_edges_rejects_out_of_range():
    with pytest.raises(ValueError):
        from_edges(2, [(0, 2)])
