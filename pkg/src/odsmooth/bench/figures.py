"""Matplotlib renderings of sweep curves and ROC overlays.

All functions draw to files (Agg backend) and return the written path, or
None when the report rows contain nothing to plot.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .report import ReportRow

_MAX_ROC_LINES = 16


def _grouped_means(
    rows: list[ReportRow], x_attr: str
) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per detector: (x values, AUC averaged over datasets at each x)."""
    by_detector: dict[str, dict[int, list[float]]] = {}
    for row in rows:
        if row.error:
            continue
        x = getattr(row, x_attr)
        by_detector.setdefault(row.detector, {}).setdefault(x, []).append(row.auc)
    out = {}
    for detector in sorted(by_detector):
        points = by_detector[detector]
        xs = np.array(sorted(points))
        ys = np.array([np.mean(points[x]) for x in xs])
        out[detector] = (xs, ys)
    return out


def plot_auc_vs_k(rows: list[ReportRow], path: str | Path) -> Path | None:
    """AUC against smoothing neighborhood size; k = 1 marks the raw detector."""
    series = _grouped_means([r for r in rows if r.na_k >= 1], "na_k")
    if not series or all(xs.size < 2 for xs, _ in series.values()):
        return None
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for detector, (xs, ys) in series.items():
        ax.plot(xs, ys, marker=".", markersize=4, linewidth=1.2, label=detector)
    ax.set_xlabel("smoothing neighborhood size k  (k = 1: no smoothing)")
    ax.set_ylabel("AUC (mean over datasets)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_auc_vs_iterations(rows: list[ReportRow], path: str | Path) -> Path | None:
    """AUC against smoothing iteration count; 0 marks the raw detector."""
    series = _grouped_means(rows, "na_iterations")
    if not series or all(xs.size < 2 for xs, _ in series.values()):
        return None
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for detector, (xs, ys) in series.items():
        ax.plot(xs, ys, marker="o", markersize=3, linewidth=1.2, label=detector)
    ax.set_xlabel("smoothing iterations  (0: no smoothing)")
    ax.set_ylabel("AUC (mean over datasets)")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_roc_overlay(
    dataset: str, curves: dict[tuple, np.ndarray], path: str | Path
) -> Path | None:
    """Overlay the ROC curves of up to 16 cells of one dataset."""
    if not curves:
        return None
    keys = sorted(curves, key=lambda k: tuple(map(str, k)))[:_MAX_ROC_LINES]
    fig, ax = plt.subplots(figsize=(5.5, 5))
    for key in keys:
        points = curves[key]
        _, detector, na_k, na_it = key
        label = detector if na_it == 0 else f"{detector} smoothed(k={na_k},it={na_it})"
        ax.plot(points[:, 0], points[:, 1], linewidth=1.2, label=label)
    ax.plot([0, 1], [0, 1], linestyle=":", color="gray", linewidth=1)
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.set_title(f"ROC: {dataset}")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
