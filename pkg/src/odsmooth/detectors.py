"""Baseline outlier detectors.

Every detector maps a dataset (and usually a shared k-NN graph) to one real
score per object, oriented so that larger always means more outlying.
Detectors whose natural statistic points the other way (in-degree, angle
variance) are inverted here so downstream smoothing, ensembles, and AUC all
see one convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset
from .neighbors import NeighborGraph, in_degree, indexed_graph_from_values, knn_indexed

DETECTOR_NAMES = (
    "knn",
    "avg_knn",
    "odin",
    "lof",
    "mod",
    "abod",
    "iforest",
    "pcad",
    "copod",
)

# detectors that consume a k-NN graph on the raw data and can share it
GRAPH_BASED = ("knn", "avg_knn", "odin", "lof", "mod", "abod")

# stand-in for an infinite local reachability density on duplicate clusters
_LRD_CAP = 1e12


@dataclass(frozen=True)
class ScoreVector:
    """Per-object outlier scores plus the identity of their producer."""

    scores: np.ndarray
    detector_id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 1:
            raise ValueError(f"scores must be 1-D, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            raise ValueError(f"detector {self.detector_id!r} produced non-finite scores")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return self.scores.shape[0]


@dataclass
class DetectorConfig:
    """A detector name plus its hyperparameters (unused ones are ignored)."""

    detector: str
    k: int = 10
    n_trees: int = 100
    subsample: int = 256
    variance_fraction: float = 0.9
    mod_iterations: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.detector not in DETECTOR_NAMES:
            raise ValueError(
                f"unknown detector {self.detector!r}; expected one of {DETECTOR_NAMES}"
            )
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.subsample < 2:
            raise ValueError("subsample must be at least 2")
        if not 0.0 < self.variance_fraction <= 1.0:
            raise ValueError("variance_fraction must be in (0, 1]")
        if self.mod_iterations < 0:
            raise ValueError("mod_iterations must be non-negative")


def knn_score(graph: NeighborGraph) -> ScoreVector:
    """Distance to the k-th nearest neighbor."""
    return ScoreVector(
        scores=graph.distances[:, -1].copy(),
        detector_id="knn",
        params={"k": graph.k},
    )


def avg_knn_score(graph: NeighborGraph) -> ScoreVector:
    """Mean distance to all k nearest neighbors."""
    return ScoreVector(
        scores=graph.distances.mean(axis=1),
        detector_id="avg_knn",
        params={"k": graph.k},
    )


def odin_score(graph: NeighborGraph) -> ScoreVector:
    """Inverted k-NN graph in-degree: 1 / (1 + in-degree), in (0, 1].

    Objects that no one lists as a neighbor score 1; popular objects score
    near 0. The inversion keeps the higher-is-more-outlying convention.
    """
    deg = in_degree(graph)
    return ScoreVector(
        scores=1.0 / (1.0 + deg),
        detector_id="odin",
        params={"k": graph.k},
    )


def lof_score(graph: NeighborGraph) -> ScoreVector:
    """Local outlier factor: density of each object relative to its neighbors.

    reach-dist_k(i <- j) = max(kdist(j), dist(i, j));
    lrd(i) = k / sum of reach-dists to i's neighbors;
    score(i) = mean(lrd(j) for j in kNN(i)) / lrd(i).

    Neighborhoods of coincident duplicates have zero total reach distance;
    their lrd is capped at 1e12 to keep every score finite.
    """
    kdist = graph.distances[:, -1]
    reach = np.maximum(kdist[graph.neighbors], graph.distances)
    reach_total = reach.sum(axis=1)
    with np.errstate(divide="ignore"):
        lrd = np.where(reach_total > 0.0, graph.k / reach_total, _LRD_CAP)
    scores = lrd[graph.neighbors].mean(axis=1) / lrd
    return ScoreVector(scores=scores, detector_id="lof", params={"k": graph.k})


def _mod_with_graph(
    dataset: Dataset, k: int, iterations: int, first_graph: NeighborGraph
) -> ScoreVector:
    original = dataset.values
    current = original
    graph = first_graph
    for step in range(iterations):
        if step > 0:
            graph = indexed_graph_from_values(current, k)
        current = current[graph.neighbors].mean(axis=1)
    displacement = np.sqrt(((current - original) ** 2).sum(axis=1))
    return ScoreVector(
        scores=displacement,
        detector_id="mod",
        params={"k": k, "mod_iterations": iterations},
    )


def mod_score(dataset: Dataset, k: int, mod_iterations: int = 3) -> ScoreVector:
    """Mean-shift displacement: how far repeated neighbor-averaging moves a point.

    Each pass replaces every point by the mean of its k nearest neighbors
    (self excluded) and rebuilds the neighbor graph on the shifted points.
    The score is the Euclidean distance between a point's original and final
    positions; isolated points travel far, cluster members barely move.
    """
    if mod_iterations == 0:
        return ScoreVector(
            scores=np.zeros(dataset.n),
            detector_id="mod",
            params={"k": k, "mod_iterations": 0},
        )
    first_graph = knn_indexed(dataset, k)
    return _mod_with_graph(dataset, k, mod_iterations, first_graph)


def abod_score(dataset: Dataset, graph: NeighborGraph) -> ScoreVector:
    """Negated variance of the weighted cosine statistic over neighbor pairs.

    For each object i and every unordered neighbor pair (a, b), accumulate
    <a-i, b-i> / (|a-i|^2 * |b-i|^2); the score is minus the variance of
    that statistic. Objects surrounded on all sides see high variance
    (strongly negative score = inlier); fringe objects see low variance.
    Pairs involving a coincident neighbor are skipped, and objects left with
    fewer than 2 usable pairs score 0.
    """
    if graph.k < 2:
        raise ValueError("abod needs k >= 2")
    values = dataset.values
    scores = np.zeros(dataset.n)
    for i in range(dataset.n):
        vectors = values[graph.neighbors[i]] - values[i]
        norms_sq = (vectors * vectors).sum(axis=1)
        usable = norms_sq > 0.0
        m = int(usable.sum())
        if m * (m - 1) // 2 < 2:
            continue
        vecs = vectors[usable]
        ns = norms_sq[usable]
        gram = vecs @ vecs.T
        a, b = np.triu_indices(m, k=1)
        stats = gram[a, b] / (ns[a] * ns[b])
        scores[i] = -stats.var()
    return ScoreVector(scores=scores, detector_id="abod", params={"k": graph.k})


def _avg_path_adjustment(m: int) -> float:
    """Expected path length c(m) of an unresolved external node of size m."""
    if m <= 1:
        return 0.0
    if m == 2:
        return 1.0
    harmonic = math.log(m - 1) + np.euler_gamma
    return 2.0 * harmonic - 2.0 * (m - 1) / m


def _build_isolation_tree(
    sub: np.ndarray, idx: np.ndarray, depth: int, limit: int, rng: np.random.Generator
) -> tuple:
    """Nodes are (feature, cut, left, right) tuples; leaves are (-1, size, None, None)."""
    m = idx.shape[0]
    if m <= 1 or depth >= limit:
        return (-1, m, None, None)
    cols = sub[idx]
    col_min = cols.min(axis=0)
    col_max = cols.max(axis=0)
    if not np.any(col_max > col_min):
        return (-1, m, None, None)  # duplicate rows cannot be split
    feature = int(rng.integers(0, sub.shape[1]))
    cut = float(rng.uniform(col_min[feature], col_max[feature]))
    below = sub[idx, feature] < cut
    left = _build_isolation_tree(sub, idx[below], depth + 1, limit, rng)
    right = _build_isolation_tree(sub, idx[~below], depth + 1, limit, rng)
    return (feature, cut, left, right)


def _tree_path_lengths(tree: tuple, values: np.ndarray) -> np.ndarray:
    out = np.empty(values.shape[0])
    stack = [(tree, np.arange(values.shape[0]), 0)]
    while stack:
        node, idx, depth = stack.pop()
        feature, payload, left, right = node
        if feature < 0:
            out[idx] = depth + _avg_path_adjustment(int(payload))
            continue
        below = values[idx, feature] < payload
        stack.append((left, idx[below], depth + 1))
        stack.append((right, idx[~below], depth + 1))
    return out


def iforest_score(dataset: Dataset, config: DetectorConfig) -> ScoreVector:
    """Isolation forest: points that random axis-parallel cuts isolate quickly.

    Builds ``n_trees`` trees, each on a random subsample of up to
    ``subsample`` rows. Every split picks a uniform random feature and a
    uniform random cut between that feature's min and max within the node;
    growth stops at height ceil(log2(subsample size)) or at single-point or
    all-duplicate nodes, whose remaining depth is estimated by the average
    unsuccessful-search length c(m). Scores are 2^(-E[path]/c(sample size)),
    always inside (0, 1), and fully determined by ``config.seed``.
    """
    n = dataset.n
    sample_size = min(config.subsample, n)
    if sample_size < 2:
        raise ValueError("isolation forest needs at least 2 rows")
    limit = math.ceil(math.log2(sample_size))
    values = dataset.values

    total_paths = np.zeros(n)
    for child_seed in np.random.SeedSequence(config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(child_seed)
        sample = rng.choice(n, size=sample_size, replace=False)
        sub = values[sample]
        tree = _build_isolation_tree(sub, np.arange(sample_size), 0, limit, rng)
        total_paths += _tree_path_lengths(tree, values)

    mean_path = total_paths / config.n_trees
    scores = np.power(2.0, -mean_path / _avg_path_adjustment(sample_size))
    return ScoreVector(
        scores=scores,
        detector_id="iforest",
        params={
            "n_trees": config.n_trees,
            "subsample": config.subsample,
            "seed": config.seed,
        },
    )


def pcad_score(dataset: Dataset, variance_fraction: float = 0.9) -> ScoreVector:
    """Normalized squared reconstruction error outside the principal subspace.

    Keeps the smallest q leading eigenvectors of the covariance explaining
    at least ``variance_fraction`` of total variance, reconstructs every
    object from them, and divides the squared residual norm by the discarded
    eigenvalue mass. If nothing is discarded (q = D, or the data lies
    exactly in the kept subspace) every score is 0.
    """
    if not 0.0 < variance_fraction <= 1.0:
        raise ValueError("variance_fraction must be in (0, 1]")
    if dataset.n < 2:
        raise ValueError("pcad needs at least 2 rows")
    centered = dataset.values - dataset.values.mean(axis=0)
    cov = centered.T @ centered / dataset.n
    eigvals, eigvecs = np.linalg.eigh(cov)
    eigvals = np.maximum(eigvals[::-1], 0.0)  # descending, clipped at 0
    eigvecs = eigvecs[:, ::-1]
    dim = eigvals.shape[0]
    total = eigvals.sum()
    params = {"variance_fraction": variance_fraction}
    if total == 0.0:
        return ScoreVector(np.zeros(dataset.n), "pcad", params)
    reached = np.flatnonzero(np.cumsum(eigvals) >= variance_fraction * total)
    q = int(reached[0]) + 1 if reached.size else dim
    discarded = eigvals[q:].sum()
    if q == dim or discarded <= total * 1e-12:
        return ScoreVector(np.zeros(dataset.n), "pcad", params)
    basis = eigvecs[:, :q]
    residual = centered - (centered @ basis) @ basis.T
    scores = (residual * residual).sum(axis=1) / discarded
    return ScoreVector(scores, "pcad", params)


def copod_score(dataset: Dataset) -> ScoreVector:
    """Empirical-copula tail probabilities, parameter-free.

    Per dimension, each value gets a left tail probability (fraction of
    values <= it) and a right tail probability (fraction >= it), ties
    sharing the larger count. A third, skewness-corrected variant picks the
    left tail on negatively skewed dimensions and the right tail otherwise.
    Each variant is aggregated as the sum over dimensions of -log p, and
    the final score is the largest of the three aggregates.
    """
    if dataset.n < 2:
        raise ValueError("copod needs at least 2 rows")
    values = dataset.values
    n, dim = values.shape
    left = np.empty_like(values)
    right = np.empty_like(values)
    skew_sign = np.empty(dim)
    for j in range(dim):
        col = values[:, j]
        ordered = np.sort(col)
        left[:, j] = np.searchsorted(ordered, col, side="right") / n
        right[:, j] = (n - np.searchsorted(ordered, col, side="left")) / n
        centered = col - col.mean()
        m2 = (centered**2).mean()
        skew_sign[j] = 0.0 if m2 == 0.0 else (centered**3).mean() / m2**1.5
    tail_left = -np.log(left)
    tail_right = -np.log(right)
    tail_skew = np.where(skew_sign < 0.0, tail_left, tail_right)
    aggregates = np.stack(
        [tail_left.sum(axis=1), tail_right.sum(axis=1), tail_skew.sum(axis=1)]
    )
    return ScoreVector(aggregates.max(axis=0), "copod", params={})


def run_detector(
    dataset: Dataset,
    config: DetectorConfig,
    graph: NeighborGraph | None = None,
) -> tuple[ScoreVector, NeighborGraph | None]:
    """Score a dataset with the configured detector.

    Returns the scores plus the k-NN graph the detector computed on the raw
    data (None for detectors that do not build one), so callers can hand it
    to the smoothing stage instead of rebuilding it.
    """
    name = config.detector
    if name in GRAPH_BASED:
        if graph is not None and graph.k >= config.k:
            graph = graph.truncated(config.k)
        else:
            graph = knn_indexed(dataset, config.k)
        if name == "knn":
            return knn_score(graph), graph
        if name == "avg_knn":
            return avg_knn_score(graph), graph
        if name == "odin":
            return odin_score(graph), graph
        if name == "lof":
            return lof_score(graph), graph
        if name == "abod":
            return abod_score(dataset, graph), graph
        if config.mod_iterations == 0:
            scores = ScoreVector(
                np.zeros(dataset.n), "mod", {"k": config.k, "mod_iterations": 0}
            )
        else:
            scores = _mod_with_graph(dataset, config.k, config.mod_iterations, graph)
        return scores, graph
    if name == "iforest":
        return iforest_score(dataset, config), None
    if name == "pcad":
        return pcad_score(dataset, config.variance_fraction), None
    return copod_score(dataset), None


def make_config(detector: str, **params) -> DetectorConfig:
    """DetectorConfig with keyword overrides; unknown keys raise."""
    return replace(DetectorConfig(detector=detector), **params)
