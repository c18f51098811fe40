"""Dataset loading, standardization, and synthetic data generation.

A dataset is an N x D matrix of finite reals plus an optional 0/1 outlier
label per row. All operations return new objects; the arrays inside a
Dataset are marked read-only so instances can be shared freely.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Dataset:
    """Numeric data matrix with optional binary outlier labels.

    Attributes:
        values: (N, D) float64 matrix, every entry finite.
        labels: optional length-N int array, 0 = inlier, 1 = outlier.
        name: identifier used in reports and file names.
    """

    values: np.ndarray
    labels: np.ndarray | None = None
    name: str = "unnamed"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {values.shape}")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError(f"dataset must be at least 1x1, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(f"non-finite value at row {bad[0]}, column {bad[1]}")
        object.__setattr__(self, "values", values)
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (values.shape[0],):
                raise ValueError(
                    f"labels length {labels.shape} does not match N={values.shape[0]}"
                )
            if not np.all((labels == 0) | (labels == 1)):
                raise ValueError("labels must be 0 or 1")
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)
        values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def n_outliers(self) -> int:
        if self.labels is None:
            raise ValueError(f"dataset {self.name!r} has no labels")
        return int(self.labels.sum())


def _parse_cell(text: str) -> float | None:
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path: str | Path, label_column: str | int | None = None) -> Dataset:
    """Load a comma-separated numeric file, optionally splitting off a label column.

    A single header row is auto-detected: if any cell of the first row fails
    to parse as a number, the row is treated as column names. The label
    column may be given by name (requires a header) or by 0-based position,
    and must contain only 0 or 1.

    Raises:
        FileNotFoundError: file does not exist.
        ValueError: ragged rows, non-numeric cells, or labels outside {0, 1}.
            Error messages name the offending file line and column.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such file: {path}")

    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh) if row]
    if not rows:
        raise ValueError(f"{path}: file contains no data")

    header: list[str] | None = None
    if any(_parse_cell(cell.strip()) is None for cell in rows[0]):
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: header but no data rows")

    width = len(rows[0])
    label_idx: int | None = None
    if label_column is not None:
        if isinstance(label_column, str):
            if header is None:
                raise ValueError(
                    f"{path}: label column {label_column!r} given by name but file has no header"
                )
            if label_column not in header:
                raise ValueError(f"{path}: no column named {label_column!r} in header")
            label_idx = header.index(label_column)
        else:
            label_idx = int(label_column)
            if not 0 <= label_idx < width:
                raise ValueError(f"{path}: label column index {label_idx} out of range")

    # line numbers are 1-based positions in the file, counting the header
    offset = 2 if header is not None else 1
    values = np.empty((len(rows), width - (0 if label_idx is None else 1)))
    labels = np.empty(len(rows), dtype=np.int64) if label_idx is not None else None
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: ragged row at line {i + offset}: "
                f"expected {width} cells, got {len(row)}"
            )
        col = 0
        for j, cell in enumerate(row):
            parsed = _parse_cell(cell.strip())
            if parsed is None:
                colname = header[j] if header else str(j)
                raise ValueError(
                    f"{path}: non-numeric cell {cell.strip()!r} "
                    f"at line {i + offset}, column {colname}"
                )
            if j == label_idx:
                if parsed not in (0.0, 1.0):
                    raise ValueError(
                        f"{path}: label {cell.strip()!r} at line {i + offset} "
                        f"is not 0 or 1"
                    )
                labels[i] = int(parsed)
            else:
                values[i, col] = parsed
                col += 1

    return Dataset(values=values, labels=labels, name=path.stem)


def save_csv(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset back to CSV with a header; values keep 17 significant digits."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        header = [f"x{j}" for j in range(dataset.dim)]
        if dataset.labels is not None:
            header.append("label")
        writer.writerow(header)
        for i in range(dataset.n):
            row = [format(v, ".17g") for v in dataset.values[i]]
            if dataset.labels is not None:
                row.append(str(int(dataset.labels[i])))
            writer.writerow(row)


def standardize(dataset: Dataset) -> Dataset:
    """Shift each column to mean 0 and scale to population standard deviation 1.

    Columns with zero variance become all-zero instead of dividing by zero.
    Labels pass through unchanged.
    """
    mu = dataset.values.mean(axis=0)
    sigma = dataset.values.std(axis=0)  # population (1/N) convention
    safe = np.where(sigma == 0.0, 1.0, sigma)
    scaled = (dataset.values - mu) / safe
    return Dataset(values=scaled, labels=dataset.labels, name=dataset.name)


# cluster population shares and standard-deviation multiples of `spread`;
# the graded sizes give the clusters distinctly different local densities
_CLUSTER_WEIGHTS = (0.80, 0.15, 0.05)
_CLUSTER_SIGMAS = (0.4, 0.8, 1.6)
_CENTER_BOX = 10.0
_NOISE_BOX = 12.0


def synth_clusters_with_outliers(
    n_inliers: int,
    n_outliers: int,
    dim: int,
    spread: float,
    seed: int,
) -> Dataset:
    """Generate tight Gaussian clusters plus uniform box noise, with labels.

    Inliers are drawn around three cluster centers placed uniformly inside
    [-10*spread, 10*spread]^dim; cluster sizes and standard deviations are
    graded (80/15/5 percent of points, 0.4/0.8/1.6 times ``spread``) so the
    clusters have clearly different local densities. Outliers are uniform
    over the enclosing box [-12*spread, 12*spread]^dim. Fully deterministic
    given ``seed``.
    """
    if n_inliers < 0 or n_outliers < 0:
        raise ValueError("counts must be non-negative")
    if n_inliers + n_outliers == 0:
        raise ValueError("dataset would be empty")
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if spread <= 0:
        raise ValueError("spread must be positive")

    rng = np.random.default_rng(seed)
    n_clusters = len(_CLUSTER_WEIGHTS)
    centers = rng.uniform(-_CENTER_BOX * spread, _CENTER_BOX * spread, size=(n_clusters, dim))
    assignment = rng.choice(n_clusters, size=n_inliers, p=_CLUSTER_WEIGHTS)
    sigma = spread * np.asarray(_CLUSTER_SIGMAS)[assignment, None]
    inliers = centers[assignment] + sigma * rng.normal(0.0, 1.0, size=(n_inliers, dim))
    outliers = rng.uniform(-_NOISE_BOX * spread, _NOISE_BOX * spread, size=(n_outliers, dim))

    values = np.vstack([inliers, outliers])
    labels = np.concatenate(
        [np.zeros(n_inliers, dtype=np.int64), np.ones(n_outliers, dtype=np.int64)]
    )
    name = f"synth_{n_inliers}in_{n_outliers}out_d{dim}_s{seed}"
    return Dataset(values=values, labels=labels, name=name)
