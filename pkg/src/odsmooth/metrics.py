"""Ranking and thresholding metrics: ROC/AUC, top-k labeling, precision/recall/F1.

AUC is computed from tied ranks (the Mann-Whitney statistic), which equals
the fraction of (outlier, inlier) pairs where the outlier outscores the
inlier, ties counted half. Two F1 flavors are reported: the usual harmonic
mean and the arithmetic mean of precision and recall, which some benchmark
write-ups use under the same name.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .detectors import ScoreVector


@dataclass(frozen=True)
class EvalResult:
    auc: float
    precision: float
    recall: float
    f1_harmonic: float
    f1_arithmetic: float
    threshold_rank: int

    def __post_init__(self) -> None:
        for name in ("auc", "precision", "recall", "f1_harmonic", "f1_arithmetic"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")


def _as_scores(scores: ScoreVector | np.ndarray) -> np.ndarray:
    if isinstance(scores, ScoreVector):
        return scores.scores
    return np.asarray(scores, dtype=np.float64)


def _check_labels(labels: np.ndarray, n: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ValueError(f"labels shape {labels.shape} does not match {n} scores")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0 or 1")
    if labels.min() == labels.max():
        raise ValueError("labels are degenerate: need at least one of each class")
    return labels.astype(np.int64)


def _tied_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties averaged; averages are exact half-integers."""
    n = values.shape[0]
    order = np.argsort(values, kind="stable")
    ordered = values[order]
    boundaries = np.flatnonzero(np.diff(ordered)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    ranks = np.empty(n)
    for lo, hi in zip(starts, ends):
        ranks[order[lo:hi]] = 0.5 * ((lo + 1) + hi)
    return ranks


def roc_auc(scores: ScoreVector | np.ndarray, labels: np.ndarray) -> float:
    """Probability that a random outlier outranks a random inlier, ties half."""
    s = _as_scores(scores)
    y = _check_labels(labels, s.shape[0])
    n_pos = int(y.sum())
    n_neg = y.shape[0] - n_pos
    rank_sum = _tied_ranks(s)[y == 1].sum()
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def roc_curve(scores: ScoreVector | np.ndarray, labels: np.ndarray) -> np.ndarray:
    """(fpr, tpr) points at every distinct threshold, from (0, 0) to (1, 1).

    Trapezoidal integration of the returned points reproduces ``roc_auc``.
    """
    s = _as_scores(scores)
    y = _check_labels(labels, s.shape[0])
    n = s.shape[0]
    n_pos = int(y.sum())
    n_neg = n - n_pos
    order = np.argsort(-s, kind="stable")
    ordered_scores = s[order]
    tp = np.cumsum(y[order])
    fp = np.cumsum(1 - y[order])
    # keep only the last position of each tied score block
    last = np.concatenate((np.flatnonzero(np.diff(ordered_scores)), [n - 1]))
    points = np.empty((last.shape[0] + 1, 2))
    points[0] = (0.0, 0.0)
    points[1:, 0] = fp[last] / n_neg
    points[1:, 1] = tp[last] / n_pos
    return points


def roc_curve_to_csv(points: np.ndarray, path: str | Path) -> None:
    """Write curve points as two-column CSV with an fpr,tpr header."""
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fpr", "tpr"])
        for fpr, tpr in points:
            writer.writerow([format(fpr, ".17g"), format(tpr, ".17g")])


def top_k_threshold(scores: ScoreVector | np.ndarray, n_outliers: int) -> np.ndarray:
    """Label exactly the n highest scorers 1, breaking ties by ascending index."""
    s = _as_scores(scores)
    n = s.shape[0]
    if not 0 <= n_outliers <= n:
        raise ValueError(f"n_outliers must be in [0, {n}], got {n_outliers}")
    order = np.lexsort((np.arange(n), -s))
    predictions = np.zeros(n, dtype=np.int64)
    predictions[order[:n_outliers]] = 1
    return predictions


def precision_recall_f1(
    predictions: np.ndarray, truth: np.ndarray
) -> tuple[float, float, float, float]:
    """(precision, recall, harmonic F1, arithmetic-mean F1), zero conventions.

    Precision is 0 when nothing is predicted positive; harmonic F1 is 0 when
    precision + recall is 0.
    """
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape:
        raise ValueError(
            f"prediction shape {predictions.shape} != truth shape {truth.shape}"
        )
    if truth.sum() < 1:
        raise ValueError("truth must contain at least one positive")
    tp = int(np.sum((predictions == 1) & (truth == 1)))
    fp = int(np.sum((predictions == 1) & (truth == 0)))
    fn = int(np.sum((predictions == 0) & (truth == 1)))
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn)
    f1_harmonic = (
        2.0 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    )
    f1_arithmetic = (precision + recall) / 2.0
    return precision, recall, f1_harmonic, f1_arithmetic


def evaluate_scores(
    scores: ScoreVector | np.ndarray,
    labels: np.ndarray,
    n_outliers: int | None = None,
) -> EvalResult:
    """AUC plus top-k precision/recall/F1 in one record.

    ``n_outliers`` defaults to the true outlier count, the usual benchmark
    thresholding rule.
    """
    s = _as_scores(scores)
    y = _check_labels(labels, s.shape[0])
    if n_outliers is None:
        n_outliers = int(y.sum())
    predictions = top_k_threshold(s, n_outliers)
    precision, recall, f1h, f1a = precision_recall_f1(predictions, y)
    return EvalResult(
        auc=roc_auc(s, y),
        precision=precision,
        recall=recall,
        f1_harmonic=f1h,
        f1_arithmetic=f1a,
        threshold_rank=n_outliers,
    )
