import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphagraph import Dataset, MetricKind, aspect_ratio, gen_random_dataset, medoid
from alphagraph.core import sample_triangle_check, triangle_violations
from reference import line_dataset, random_metric


class TestDistance:
    def test_three_four_five(self):
        ds = Dataset.from_points([[0, 0], [3, 4]])
        assert ds.distance(0, 1) == 5.0

    def test_identity(self):
        ds = gen_random_dataset(10, 3, seed=0)
        assert all(ds.distance(i, i) == 0.0 for i in range(10))

    def test_symmetric_bit_exact(self):
        ds = gen_random_dataset(30, 7, seed=1)
        for i in range(30):
            for j in range(30):
                assert ds.distance(i, j) == ds.distance(j, i)

    def test_matches_numpy(self):
        ds = gen_random_dataset(20, 5, seed=2)
        for i, j in [(0, 1), (3, 17), (19, 4)]:
            assert ds.distance(i, j) == pytest.approx(np.linalg.norm(ds.points[i] - ds.points[j]), rel=1e-15)

    def test_out_of_range(self):
        ds = gen_random_dataset(3, 2, seed=0)
        with pytest.raises(IndexError):
            ds.distance(0, 3)

    def test_matrix_form_lookup(self):
        a1, a2 = 3.0, 2.0
        from alphagraph import gen_sorted_general_tight_config

        cfg = gen_sorted_general_tight_config(a1, a2)
        assert cfg.dist("x", "z") == pytest.approx(5 / 6, abs=1e-15)


class TestValidation:
    def test_duplicates_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            Dataset.from_points([[0, 0], [1, 1], [0, 0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Dataset.from_points([[0, np.nan]])

    def test_matrix_checks(self):
        with pytest.raises(ValueError, match="symmetric"):
            Dataset.from_matrix([[0, 1], [2, 0]])
        with pytest.raises(ValueError, match="diagonal"):
            Dataset.from_matrix([[1, 1], [1, 0]])
        with pytest.raises(ValueError, match="triangle"):
            Dataset.from_matrix([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
        with pytest.raises(ValueError, match="duplicate"):
            Dataset.from_matrix([[0, 0], [0, 0]])

    def test_metric_kind(self):
        assert gen_random_dataset(3, 2, seed=0).metric is MetricKind.EUCLIDEAN
        ds = Dataset.from_matrix(random_metric(5, np.random.default_rng(0)))
        assert ds.metric is MetricKind.GENERAL and ds.d is None

    def test_frozen(self):
        ds = gen_random_dataset(5, 2, seed=0)
        with pytest.raises(ValueError):
            ds.points[0, 0] = 1.0

    def test_euclidean_induced_matrix_is_metric(self):
        ds = gen_random_dataset(60, 4, seed=3)
        assert sample_triangle_check(ds, samples=2000, seed=1, tol=1e-9)
        full = np.sqrt(((ds.points[:, None] - ds.points[None]) ** 2).sum(-1))
        assert triangle_violations(full, tol=1e-9) == []


class TestMedoid:
    def test_middle_point(self):
        assert medoid(line_dataset([0, 1, 10])) == 1

    def test_single(self):
        assert medoid(line_dataset([4.0])) == 0

    def test_hand_sums(self):
        # sums 109, 103, 102, 103, 391
        assert medoid(line_dataset([0, 2, 3, 4, 100])) == 2

    def test_tie_lowest_index(self):
        assert medoid(line_dataset([0, 1])) == 0

    def test_brute_force(self):
        ds = gen_random_dataset(80, 3, seed=4)
        sums = [sum(ds.distance(i, j) for j in range(80)) for i in range(80)]
        assert medoid(ds) == int(np.argmin(sums))

    def test_threads_agree(self):
        ds = gen_random_dataset(300, 5, seed=5)
        assert medoid(ds, threads=1) == medoid(ds, threads=4)

    def test_general_metric(self):
        M = random_metric(12, np.random.default_rng(1))
        assert medoid(Dataset.from_matrix(M)) == int(np.argmin(M.sum(1)))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000), st.sampled_from([0.5, 2.0, 8.0]))
    def test_scale_invariant(self, seed, scale):
        ds = gen_random_dataset(25, 3, seed=seed)
        scaled = Dataset.from_points(ds.points * scale)
        assert medoid(ds) == medoid(scaled)


class TestAspectRatio:
    def test_line(self):
        assert aspect_ratio(line_dataset([0, 1, 2])).delta == 2.0

    def test_square(self):
        ds = Dataset.from_points([[0, 0], [1, 0], [0, 1], [1, 1]])
        assert aspect_ratio(ds).delta == pytest.approx(math.sqrt(2), rel=1e-15)

    def test_hand(self):
        assert aspect_ratio(line_dataset([0, 0.5, 10])).delta == 20.0

    def test_needs_two(self):
        with pytest.raises(ValueError):
            aspect_ratio(line_dataset([1.0]))


class TestGenerator:
    def test_deterministic(self):
        a = gen_random_dataset(5, 2, seed=7)
        b = gen_random_dataset(5, 2, seed=7)
        assert a.points.tobytes() == b.points.tobytes()

    def test_shape(self):
        ds = gen_random_dataset(1000, 16, seed=1, dist="gaussian")
        assert (ds.n, ds.d) == (1000, 16)

    def test_clustered(self):
        ds = gen_random_dataset(100, 2, seed=3, dist="clustered(4)")
        assert aspect_ratio(ds).min_distance > 0
        # four centres spread over [-10, 10]^2 with unit noise: nearest-centre groups
        from scipy.cluster.vq import kmeans2

        _, labels = kmeans2(ds.points, 4, seed=0, minit="++")
        assert len(set(labels.tolist())) == 4

    def test_uniform_cube(self):
        ds = gen_random_dataset(50, 3, seed=2, dist="uniform_cube")
        assert ds.points.min() >= 0 and ds.points.max() < 1

    def test_float32_representable(self):
        ds = gen_random_dataset(50, 3, seed=2)
        assert np.array_equal(ds.points.astype(np.float32).astype(np.float64), ds.points)

    def test_bad_dist(self):
        with pytest.raises(ValueError):
            gen_random_dataset(5, 2, seed=0, dist="cauchy")
