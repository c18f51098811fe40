"""Exact k-nearest-neighbor search and the shared k-NN graph.

The graph links every object to its k nearest other objects under the
Euclidean metric. Distance ties are broken by ascending object index, which
makes every consumer (detectors, score smoothing, oracle tests)
deterministic. ``knn_brute`` is the quadratic reference; ``knn_indexed``
returns the identical graph through a KD-tree in low dimensions and a ball
tree in high dimensions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._trees import BallTree, KDTree
from .dataset import Dataset

# dimensionality at which the spatial index switches from KD-tree to ball tree
BALL_TREE_MIN_DIM = 20


@dataclass(frozen=True)
class NeighborGraph:
    """Per-object nearest neighbors: (N, k) index and distance matrices.

    Each row lists a point's k nearest other points ordered by ascending
    (distance, index); a point never appears in its own row.
    """

    k: int
    neighbors: np.ndarray
    distances: np.ndarray

    def __post_init__(self) -> None:
        if self.neighbors.shape != self.distances.shape:
            raise ValueError("neighbor and distance matrices must have equal shape")
        if self.neighbors.shape[1] != self.k:
            raise ValueError(f"expected {self.k} columns, got {self.neighbors.shape[1]}")
        self.neighbors.setflags(write=False)
        self.distances.setflags(write=False)

    @property
    def n(self) -> int:
        return self.neighbors.shape[0]

    def truncated(self, k: int) -> "NeighborGraph":
        """First k columns as a standalone graph (valid because rows are sorted)."""
        if not 1 <= k <= self.k:
            raise ValueError(f"cannot truncate graph of k={self.k} to k={k}")
        if k == self.k:
            return self
        return NeighborGraph(
            k=k, neighbors=self.neighbors[:, :k], distances=self.distances[:, :k]
        )


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, N-1] = [1, {n - 1}], got {k}")


def knn_graph_from_values(values: np.ndarray, k: int) -> NeighborGraph:
    """Brute-force exact k-NN over a raw matrix (quadratic scan)."""
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    _check_k(n, k)
    neighbors = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k))
    row_ids = np.arange(n)
    for i in range(n):
        diff = values - values[i]
        d2 = (diff * diff).sum(axis=1)
        d2[i] = np.inf  # self excluded
        order = np.lexsort((row_ids, d2))[:k]
        neighbors[i] = order
        distances[i] = np.sqrt(d2[order])
    return NeighborGraph(k=k, neighbors=neighbors, distances=distances)


def knn_brute(dataset: Dataset, k: int) -> NeighborGraph:
    """Exact k-NN graph by quadratic scan; the oracle for the indexed search."""
    return knn_graph_from_values(dataset.values, k)


def indexed_graph_from_values(values: np.ndarray, k: int) -> NeighborGraph:
    """Tree-indexed exact k-NN over a raw matrix; equals the brute-force graph."""
    values = np.asarray(values, dtype=np.float64)
    n, dim = values.shape
    _check_k(n, k)
    leaf_size = max(64, 2 * k)  # large-k queries amortize better over big leaves
    if dim < BALL_TREE_MIN_DIM:
        tree = KDTree(values, leaf_size=leaf_size)
    else:
        tree = BallTree(values, leaf_size=leaf_size)
    neighbors = np.empty((n, k), dtype=np.int64)
    distances = np.empty((n, k))
    for i in range(n):
        idx, dist = tree.query_point(values[i], k, exclude=i)
        neighbors[i] = idx
        distances[i] = dist
    return NeighborGraph(k=k, neighbors=neighbors, distances=distances)


def knn_indexed(dataset: Dataset, k: int) -> NeighborGraph:
    """Exact k-NN graph via a spatial index.

    Uses a KD-tree for D < 20 and a ball tree otherwise; output is identical
    to ``knn_brute`` including the index tie rule.
    """
    return indexed_graph_from_values(dataset.values, k)


def in_degree(graph: NeighborGraph) -> np.ndarray:
    """How many objects list each object among their neighbors; sums to N*k."""
    return np.bincount(graph.neighbors.ravel(), minlength=graph.n)


def dump_graph_csv(graph: NeighborGraph, path: str | Path) -> None:
    """Debug dump: one (object, rank, neighbor, distance) row per graph edge."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["object", "rank", "neighbor", "distance"])
        for i in range(graph.n):
            for rank in range(graph.k):
                writer.writerow(
                    [
                        i,
                        rank,
                        int(graph.neighbors[i, rank]),
                        format(graph.distances[i, rank], ".17g"),
                    ]
                )
