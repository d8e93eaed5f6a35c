import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphagraph import (
    Dataset,
    ProximityGraph,
    aspect_ratio,
    audit_reachability,
    brute_force_knn,
    build_slow,
    gen_random_dataset,
    greedy_search,
    recall_at_k,
)
from alphagraph.search import search_batch
from reference import dist_fn, line_dataset, random_metric, ref_greedy_search


def path_graph():
    g = ProximityGraph.from_lists([[1], [2], []])
    g.start = 0
    return g, line_dataset([0, 1, 2])


class TestGreedySearch:
    def test_path_trace(self):
        g, ds = path_graph()
        r = greedy_search(g, ds, np.array([2.1]), 1, 3)
        assert r.top_k == [2] and r.visited_set == {0, 1, 2} and r.hops == 3

    def test_query_at_start(self):
        ds = gen_random_dataset(50, 3, seed=0)
        g = build_slow(ds, 1.2)
        for L in (1, 5, 20):
            assert greedy_search(g, ds, ds.points[g.start], 1, L).top_k[0] == g.start

    def test_k_above_L(self):
        g, ds = path_graph()
        with pytest.raises(ValueError):
            greedy_search(g, ds, np.array([0.0]), 4, 3)

    def test_dimension_mismatch(self):
        g, ds = path_graph()
        with pytest.raises(ValueError):
            greedy_search(g, ds, np.array([0.0, 1.0]), 1, 3)

    def test_fewer_reachable_than_k(self):
        g, ds = path_graph()
        g.start = 2
        r = greedy_search(g, ds, np.array([0.0]), 3, 3)
        assert r.top_k == [2] and r.hops == 1

    def test_index_query_general_metric(self):
        M = random_metric(10, np.random.default_rng(3))
        ds = Dataset.from_matrix(M)
        g = build_slow(ds, 1.5)
        r = greedy_search(g, ds, 4, 1, 5)
        assert r.top_k == [4]
        with pytest.raises(ValueError):
            greedy_search(g, ds, np.zeros(3), 1, 5)

    def test_distances_reported(self):
        g, ds = path_graph()
        r = greedy_search(g, ds, np.array([2.1]), 2, 3)
        assert r.distances == pytest.approx([0.1, 1.1], abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(
        seed=st.integers(0, 2**31),
        L=st.integers(1, 12),
        deg=st.integers(1, 5),
        general=st.booleans(),
    )
    def test_matches_reference(self, seed, L, deg, general):
        rng = np.random.default_rng(seed)
        n = 25
        ds = Dataset.from_matrix(random_metric(n, rng)) if general else gen_random_dataset(n, 2, seed=seed)
        D = dist_fn(ds)
        adj = [rng.choice([v for v in range(n) if v != p], size=deg, replace=False).tolist() for p in range(n)]
        g = ProximityGraph.from_lists(adj)
        g.start = int(rng.integers(n))
        if general:
            qi = int(rng.integers(n))
            query, qdist = qi, (lambda v: D(v, qi))
        else:
            qv = rng.standard_normal(2)
            query, qdist = qv, (lambda v: math.dist(ds.points[v], qv))
        k = min(L, 3)
        r = greedy_search(g, ds, query, k, L)
        top, order = ref_greedy_search(adj, g.start, qdist, k, L)
        assert r.top_k == top
        assert r.visited == order
        assert r.hops == len(order) <= n

    def test_batch_matches_single(self):
        ds = gen_random_dataset(200, 4, seed=11)
        g = build_slow(ds, 1.3)
        q = np.random.default_rng(0).standard_normal((20, 4))
        ids, hops = search_batch(g, ds, q, 5, 15)
        for i in range(20):
            r = greedy_search(g, ds, q[i], 5, 15)
            assert ids[i].tolist() == r.top_k and hops[i] == r.hops


def test_search_bound_on_reachable_graph():
    alpha = 2.0
    ds = gen_random_dataset(200, 4, seed=11)
    g = build_slow(ds, alpha)
    assert audit_reachability(g, ds).alpha_star >= alpha
    eps = aspect_ratio(ds).delta * 1e-6
    q = np.random.default_rng(1).standard_normal((50, 4))
    truth = brute_force_knn(ds, q, 10)
    for i in range(50):
        r = greedy_search(g, ds, q[i], 10, 50)
        for j, b in enumerate(r.top_k):
            a = truth[i, j]
            db = math.dist(ds.points[b], q[i])
            da = math.dist(ds.points[a], q[i])
            assert db <= eps + alpha / (alpha - 1) * da


def test_general_metric_bound():
    alpha = 1.5
    M = random_metric(40, np.random.default_rng(5))
    ds = Dataset.from_matrix(M)
    g = build_slow(ds, alpha)
    eps = aspect_ratio(ds).delta * 1e-6
    for qi in range(40):
        r = greedy_search(g, ds, qi, 5, 10)
        order = np.argsort(M[qi], kind="stable")
        for j, b in enumerate(r.top_k):
            assert M[b, qi] <= eps + (alpha + 1) / (alpha - 1) * M[order[j], qi]


class TestBruteForce:
    def test_exact_point(self):
        ds = gen_random_dataset(30, 3, seed=0)
        assert brute_force_knn(ds, ds.points[7:8], 1).tolist() == [[7]]

    def test_line(self):
        assert brute_force_knn(line_dataset([0, 1, 3]), [[0.9]], 2).tolist() == [[1, 0]]

    def test_tie_by_index(self):
        assert brute_force_knn(line_dataset([0, 2]), [[1.0]], 2).tolist() == [[0, 1]]

    def test_k_equals_n(self):
        ds = gen_random_dataset(20, 2, seed=1)
        out = brute_force_knn(ds, np.zeros((3, 2)), 20)
        assert all(sorted(r) == list(range(20)) for r in out.tolist())

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            brute_force_knn(line_dataset([0, 1]), [[0.0]], 3)

    def test_general_metric_index_queries(self):
        M = random_metric(8, np.random.default_rng(0))
        out = brute_force_knn(Dataset.from_matrix(M), np.array([2, 5]), 3)
        assert out[0, 0] == 2 and out[1, 0] == 5


class TestRecall:
    def test_identical(self):
        assert recall_at_k([1, 2, 3], [1, 2, 3], 3) == 1.0

    def test_disjoint(self):
        assert recall_at_k([1, 2], [3, 4], 2) == 0.0

    def test_partial(self):
        assert recall_at_k([1, 2, 3, 9], [1, 2, 3, 4], 4) == 0.75

    def test_short_result(self):
        assert recall_at_k([1], [1, 2], 2) == 0.5

    def test_zero_k(self):
        with pytest.raises(ValueError):
            recall_at_k([1], [1], 0)
