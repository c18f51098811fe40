"""Dataset loading, standardization, and the synthetic generator."""

import numpy as np
import pytest

from odsmooth import (
    Dataset,
    knn_brute,
    knn_score,
    load_csv,
    roc_auc,
    save_csv,
    standardize,
    synth_clusters_with_outliers,
)


# ---------------------------------------------------------------------------
# CSV loading
# ---------------------------------------------------------------------------


class TestLoadCsv:
    def test_basic_with_label_index(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,2,0\n3,4,0\n9,9,1\n")
        data = load_csv(path, label_column=2)
        assert data.n == 3 and data.dim == 2
        np.testing.assert_array_equal(data.values, [[1, 2], [3, 4], [9, 9]])
        np.testing.assert_array_equal(data.labels, [0, 0, 1])

    def test_header_is_skipped(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x,y,label\n1,2,0\n3,4,0\n9,9,1\n")
        data = load_csv(path, label_column=2)
        np.testing.assert_array_equal(data.values, [[1, 2], [3, 4], [9, 9]])
        np.testing.assert_array_equal(data.labels, [0, 0, 1])

    def test_label_column_by_name(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("x,label,y\n1,0,2\n3,1,4\n")
        data = load_csv(path, label_column="label")
        np.testing.assert_array_equal(data.values, [[1, 2], [3, 4]])
        np.testing.assert_array_equal(data.labels, [0, 1])

    def test_no_label_column(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,2\n3,4\n")
        data = load_csv(path)
        assert data.labels is None
        assert data.dim == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_csv(tmp_path / "nope.csv")

    def test_non_numeric_cell_names_position(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\n3,abc\n")
        with pytest.raises(ValueError, match=r"'abc'.*line 3.*column y"):
            load_csv(path)

    def test_label_outside_binary(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2,0\n3,4,2\n")
        with pytest.raises(ValueError, match=r"label '2'.*line 2"):
            load_csv(path, label_column=2)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,2\n3,4,5\n")
        with pytest.raises(ValueError, match=r"ragged row at line 2"):
            load_csv(path)

    def test_label_name_without_header(self, tmp_path):
        path = tmp_path / "toy.csv"
        path.write_text("1,2,0\n")
        with pytest.raises(ValueError, match="no header"):
            load_csv(path, label_column="label")

    def test_roundtrip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        original = Dataset(
            values=rng.normal(0, 1, (25, 4)) * 10.0 ** rng.integers(-8, 8, (25, 4)),
            labels=rng.integers(0, 2, 25) | np.array([1] + [0] * 24),
            name="rt",
        )
        path = tmp_path / "rt.csv"
        save_csv(original, path)
        reloaded = load_csv(path, label_column="label")
        np.testing.assert_array_equal(reloaded.values, original.values)
        np.testing.assert_array_equal(reloaded.labels, original.labels)


# ---------------------------------------------------------------------------
# Dataset validation
# ---------------------------------------------------------------------------


class TestDatasetValidation:
    def test_rejects_nan(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(values=np.array([[1.0], [np.nan]]))

    def test_rejects_inf(self):
        with pytest.raises(ValueError, match="non-finite"):
            Dataset(values=np.array([[np.inf, 0.0]]))

    def test_rejects_bad_label_length(self):
        with pytest.raises(ValueError, match="labels length"):
            Dataset(values=np.zeros((3, 2)), labels=np.array([0, 1]))

    def test_rejects_non_binary_labels(self):
        with pytest.raises(ValueError, match="labels must be 0 or 1"):
            Dataset(values=np.zeros((2, 2)), labels=np.array([0, 2]))

    def test_values_are_read_only(self):
        data = Dataset(values=np.ones((2, 2)))
        with pytest.raises(ValueError):
            data.values[0, 0] = 5.0


# ---------------------------------------------------------------------------
# Standardization
# ---------------------------------------------------------------------------


class TestStandardize:
    def test_two_point_column(self):
        data = Dataset(values=np.array([[1.0], [3.0]]))
        out = standardize(data)
        np.testing.assert_array_equal(out.values, [[-1.0], [1.0]])

    def test_constant_column_becomes_zero(self):
        data = Dataset(values=np.array([[5.0], [5.0], [5.0]]))
        out = standardize(data)
        np.testing.assert_array_equal(out.values, np.zeros((3, 1)))

    def test_moments_after_standardizing(self):
        data = Dataset(values=np.array([[1.0], [2.0], [6.0]]))
        out = standardize(data)
        assert abs(out.values.mean()) < 1e-12
        assert abs(out.values.std() - 1.0) < 1e-12

    def test_idempotent(self):
        rng = np.random.default_rng(0)
        data = Dataset(values=rng.normal(3, 7, (40, 3)))
        once = standardize(data)
        twice = standardize(once)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-9)

    def test_labels_pass_through(self):
        labels = np.array([0, 1, 0])
        data = Dataset(values=np.arange(6.0).reshape(3, 2), labels=labels)
        out = standardize(data)
        np.testing.assert_array_equal(out.labels, labels)


# ---------------------------------------------------------------------------
# Synthetic generator
# ---------------------------------------------------------------------------


class TestSynthClusters:
    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            synth_clusters_with_outliers(0, 0, 2, 1.0, 5)

    def test_deterministic(self):
        a = synth_clusters_with_outliers(100, 10, 2, 1.0, 42)
        b = synth_clusters_with_outliers(100, 10, 2, 1.0, 42)
        np.testing.assert_array_equal(a.values, b.values)
        np.testing.assert_array_equal(a.labels, b.labels)

    def test_label_layout(self):
        data = synth_clusters_with_outliers(30, 5, 3, 2.0, 1)
        assert data.n == 35 and data.dim == 3
        assert data.labels.sum() == 5
        np.testing.assert_array_equal(data.labels[:30], 0)

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            synth_clusters_with_outliers(10, 1, 0, 1.0, 1)
        with pytest.raises(ValueError):
            synth_clusters_with_outliers(10, 1, 2, 0.0, 1)
        with pytest.raises(ValueError):
            synth_clusters_with_outliers(-1, 1, 2, 1.0, 1)

    def test_kth_distance_scoring_separates(self, clustered_dataset):
        """Brute-force kth-NN distance must rank the box noise highly."""
        graph = knn_brute(clustered_dataset, 10)
        auc = roc_auc(knn_score(graph), clustered_dataset.labels)
        assert auc > 0.9
        np.testing.assert_allclose(auc, 0.99284, atol=1e-12)
