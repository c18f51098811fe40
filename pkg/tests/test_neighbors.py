"""k-NN graph construction: brute force, spatial index, and in-degrees."""

import numpy as np
import pytest

from odsmooth import Dataset, dump_graph_csv, in_degree, knn_brute, knn_indexed


def _quadratic_scan(values, k):
    """Independent oracle: per-point sorted (distance, index) double loop."""
    n = len(values)
    neighbors = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k))
    for i in range(n):
        ranked = sorted(
            (float(np.sqrt(((values[i] - values[j]) ** 2).sum())), j)
            for j in range(n)
            if j != i
        )[:k]
        neighbors[i] = [j for _, j in ranked]
        distances[i] = [d for d, _ in ranked]
    return neighbors, distances


def _line_dataset():
    return Dataset(values=np.array([[0.0], [1.0], [3.0]]), name="line")


# ---------------------------------------------------------------------------
# Brute force
# ---------------------------------------------------------------------------


class TestKnnBrute:
    def test_hand_geometry(self):
        graph = knn_brute(_line_dataset(), 1)
        np.testing.assert_array_equal(graph.neighbors, [[1], [0], [1]])
        np.testing.assert_array_equal(graph.distances, [[1.0], [1.0], [2.0]])

    def test_duplicate_tie_breaks_by_index(self):
        data = Dataset(values=np.array([[0.0], [0.0], [5.0]]))
        graph = knn_brute(data, 1)
        assert graph.neighbors[0, 0] == 1
        assert graph.distances[0, 0] == 0.0
        assert graph.neighbors[1, 0] == 0

    def test_matches_quadratic_scan(self):
        rng = np.random.default_rng(11)
        data = Dataset(values=rng.normal(0, 1, (200, 5)))
        graph = knn_brute(data, 10)
        neighbors, distances = _quadratic_scan(data.values, 10)
        np.testing.assert_array_equal(graph.neighbors, neighbors)
        np.testing.assert_allclose(graph.distances, distances, atol=1e-12)

    def test_k_out_of_range(self):
        data = _line_dataset()
        with pytest.raises(ValueError):
            knn_brute(data, 0)
        with pytest.raises(ValueError):
            knn_brute(data, 3)

    def test_self_never_in_own_row(self):
        rng = np.random.default_rng(5)
        data = Dataset(values=rng.normal(0, 1, (60, 3)))
        graph = knn_brute(data, 12)
        for i in range(60):
            assert i not in graph.neighbors[i]

    def test_rows_sorted_ascending(self):
        rng = np.random.default_rng(6)
        data = Dataset(values=rng.normal(0, 1, (50, 2)))
        graph = knn_brute(data, 9)
        assert np.all(np.diff(graph.distances, axis=1) >= 0)


# ---------------------------------------------------------------------------
# Spatial index equivalence
# ---------------------------------------------------------------------------


class TestKnnIndexed:
    @pytest.mark.parametrize("dim", [1, 2, 3, 7, 19, 20, 21, 35])
    def test_matches_brute(self, dim):
        rng = np.random.default_rng(dim)
        values = rng.normal(0, 1, (130, dim))
        values = np.vstack([values, values[rng.integers(0, 130, 8)]])  # duplicates
        data = Dataset(values=values)
        for k in (1, 5, 20):
            brute = knn_brute(data, k)
            indexed = knn_indexed(data, k)
            np.testing.assert_array_equal(indexed.neighbors, brute.neighbors)
            np.testing.assert_array_equal(indexed.distances, brute.distances)

    def test_heavy_ties_integer_grid(self):
        rng = np.random.default_rng(2)
        data = Dataset(values=rng.integers(-2, 3, (150, 2)).astype(float))
        for k in (1, 4, 17):
            brute = knn_brute(data, k)
            indexed = knn_indexed(data, k)
            np.testing.assert_array_equal(indexed.neighbors, brute.neighbors)
            np.testing.assert_array_equal(indexed.distances, brute.distances)

    def test_500_points_3d(self):
        rng = np.random.default_rng(9)
        data = Dataset(values=rng.normal(0, 1, (500, 3)))
        brute = knn_brute(data, 20)
        indexed = knn_indexed(data, 20)
        np.testing.assert_array_equal(indexed.neighbors, brute.neighbors)
        np.testing.assert_array_equal(indexed.distances, brute.distances)

    def test_300_points_30d_ball_tree_path(self):
        rng = np.random.default_rng(10)
        data = Dataset(values=rng.normal(0, 1, (300, 30)))
        brute = knn_brute(data, 15)
        indexed = knn_indexed(data, 15)
        np.testing.assert_array_equal(indexed.neighbors, brute.neighbors)
        np.testing.assert_array_equal(indexed.distances, brute.distances)


# ---------------------------------------------------------------------------
# Graph structure
# ---------------------------------------------------------------------------


class TestGraphProperties:
    def test_smaller_k_is_prefix_of_larger(self):
        rng = np.random.default_rng(13)
        data = Dataset(values=rng.normal(0, 1, (80, 4)))
        for k in (1, 3, 9):
            small = knn_brute(data, k)
            large = knn_brute(data, k + 1)
            np.testing.assert_array_equal(large.neighbors[:, :k], small.neighbors)

    def test_truncated_equals_small_build(self):
        rng = np.random.default_rng(14)
        data = Dataset(values=rng.normal(0, 1, (70, 3)))
        large = knn_brute(data, 12)
        small = knn_brute(data, 5)
        cut = large.truncated(5)
        np.testing.assert_array_equal(cut.neighbors, small.neighbors)
        np.testing.assert_array_equal(cut.distances, small.distances)
        assert large.truncated(12) is large

    def test_truncated_range_check(self):
        data = Dataset(values=np.arange(8.0).reshape(4, 2))
        graph = knn_brute(data, 2)
        with pytest.raises(ValueError):
            graph.truncated(3)


class TestInDegree:
    def test_line_example(self):
        graph = knn_brute(_line_dataset(), 1)
        np.testing.assert_array_equal(in_degree(graph), [1, 2, 0])

    def test_conservation(self):
        rng = np.random.default_rng(1)
        data = Dataset(values=rng.normal(0, 1, (45, 3)))
        graph = knn_brute(data, 6)
        assert in_degree(graph).sum() == 45 * 6

    def test_matches_direct_count(self):
        rng = np.random.default_rng(7)
        data = Dataset(values=rng.normal(0, 1, (100, 2)))
        graph = knn_brute(data, 5)
        degrees = in_degree(graph)
        for i in range(100):
            assert degrees[i] == int((graph.neighbors == i).sum())


def test_dump_graph_csv(tmp_path):
    graph = knn_brute(_line_dataset(), 1)
    path = tmp_path / "graph.csv"
    dump_graph_csv(graph, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "object,rank,neighbor,distance"
    assert len(lines) == 1 + 3 * 1
    assert lines[1].startswith("0,0,1,")
