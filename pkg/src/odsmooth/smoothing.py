"""Neighborhood averaging of outlier scores over the k-NN graph.

The smoother replaces each object's score by the uniform average of its own
score and its k nearest neighbors' scores. Neighbors live in feature space,
so the same graph serves every iteration; iterations are synchronous, each
one reading only the previous iteration's vector. Averaging never leaves
the [min, max] band of its input, and constant score vectors are exact
fixed points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .detectors import ScoreVector
from .neighbors import NeighborGraph, knn_indexed

DEFAULT_K = 100
DEFAULT_ITERATIONS = 1


@dataclass
class SmoothingConfig:
    """Neighborhood size and iteration count for score smoothing.

    ``k`` is clamped to N-1 on small datasets. ``reuse_graph`` lets an
    existing graph with at least k columns stand in for a fresh build.
    """

    k: int = DEFAULT_K
    iterations: int = DEFAULT_ITERATIONS
    reuse_graph: bool = True

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


@dataclass(frozen=True)
class SmoothingResult:
    """Smoothed scores plus provenance needed for timing reports."""

    scores: ScoreVector
    graph_reused: bool
    k: int
    graph: NeighborGraph


def _average_once(graph: NeighborGraph, values: np.ndarray) -> np.ndarray:
    # deviation form of (S_i + sum of neighbor scores) / (k + 1): constant
    # vectors stay bit-identical and outputs cannot escape [min, max]
    deviations = values[graph.neighbors] - values[:, None]
    return values + deviations.sum(axis=1) / (graph.k + 1.0)


def neighborhood_average(
    graph: NeighborGraph, scores: ScoreVector, iterations: int = 1
) -> ScoreVector:
    """Average each score with its neighbors' scores, ``iterations`` times.

    Every pass maps score S_i to (S_i + sum over kNN(i) of S_j) / (k + 1),
    computing all outputs from the input vector alone. ``iterations=0``
    returns the input unchanged.
    """
    if graph.n != len(scores):
        raise ValueError(
            f"graph covers {graph.n} objects but scores cover {len(scores)}"
        )
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if iterations == 0:
        return scores
    values = scores.scores
    for _ in range(iterations):
        values = _average_once(graph, values)
    return ScoreVector(
        scores=values,
        detector_id=f"{scores.detector_id}+na",
        params={**scores.params, "na_k": graph.k, "na_iterations": iterations},
    )


def smooth(
    dataset: Dataset,
    scores: ScoreVector,
    config: SmoothingConfig | None = None,
    graph: NeighborGraph | None = None,
) -> SmoothingResult:
    """Full smoothing step: clamp k, obtain a graph, average, report reuse.

    A supplied ``graph`` is reused (truncated to the clamped k) whenever
    ``config.reuse_graph`` is set and it has enough columns; otherwise a
    fresh graph is built with the spatial index.
    """
    if config is None:
        config = SmoothingConfig()
    if dataset.n != len(scores):
        raise ValueError(
            f"dataset has {dataset.n} objects but scores cover {len(scores)}"
        )
    if dataset.n < 2:
        raise ValueError("smoothing needs at least 2 objects")
    k = min(config.k, dataset.n - 1)
    if graph is not None and config.reuse_graph and graph.k >= k:
        graph = graph.truncated(k)
        reused = True
    else:
        graph = knn_indexed(dataset, k)
        reused = False
    smoothed = neighborhood_average(graph, scores, config.iterations)
    return SmoothingResult(scores=smoothed, graph_reused=reused, k=k, graph=graph)
