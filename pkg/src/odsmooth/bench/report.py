"""Report rows, summaries, and artifact emission for experiment runs.

The raw report is a flat CSV, one row per evaluated (dataset, detector,
smoothing) cell; cells that failed carry their error message and empty
metrics. Summaries are group-by means; a detector-level summary compares
original, default-smoothing, and best-smoothing AUC per detector. Every
emitted artifact is listed in a manifest stamped with the config hash.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..smoothing import DEFAULT_K
from ..metrics import roc_curve_to_csv

METRIC_FIELDS = (
    "auc",
    "precision",
    "recall",
    "f1_harmonic",
    "f1_arithmetic",
    "detector_time_s",
    "na_time_s",
)
GROUP_AXES = ("dataset", "detector", "na_k", "na_iterations")


@dataclass(frozen=True)
class ReportRow:
    """One evaluated cell; na_k = 0 with na_iterations = 0 means smoothing off."""

    dataset: str
    detector: str
    na_k: int
    na_iterations: int
    auc: float = math.nan
    precision: float = math.nan
    recall: float = math.nan
    f1_harmonic: float = math.nan
    f1_arithmetic: float = math.nan
    detector_time_s: float = math.nan
    na_time_s: float = math.nan
    graph_reused: bool = False
    error: str = ""

    @property
    def smoothing_off(self) -> bool:
        return self.na_iterations == 0

    def cell_key(self) -> tuple:
        return (self.dataset, self.detector, self.na_k, self.na_iterations)


_COLUMNS = [f.name for f in fields(ReportRow)]


def write_report_csv(rows: list[ReportRow], path: str | Path) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_COLUMNS)
        for row in sorted(rows, key=ReportRow.cell_key):
            record = []
            for name in _COLUMNS:
                value = getattr(row, name)
                if isinstance(value, float):
                    record.append("" if math.isnan(value) else format(value, ".17g"))
                elif isinstance(value, bool):
                    record.append("true" if value else "false")
                else:
                    record.append(str(value))
            writer.writerow(record)


def read_report_csv(path: str | Path) -> list[ReportRow]:
    with open(Path(path), newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != _COLUMNS:
            raise ValueError(
                f"{path}: unexpected report columns {reader.fieldnames}"
            )
        rows = []
        for record in reader:
            kwargs: dict = {
                "dataset": record["dataset"],
                "detector": record["detector"],
                "na_k": int(record["na_k"]),
                "na_iterations": int(record["na_iterations"]),
                "graph_reused": record["graph_reused"] == "true",
                "error": record["error"],
            }
            for name in METRIC_FIELDS:
                kwargs[name] = float(record[name]) if record[name] else math.nan
            rows.append(ReportRow(**kwargs))
    return rows


@dataclass(frozen=True)
class SummaryTable:
    title: str
    headers: list[str]
    rows: list[list]

    def to_csv(self, path: str | Path) -> None:
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.headers)
            for row in self.rows:
                writer.writerow([_format_value(v) for v in row])

    def to_text(self) -> str:
        cells = [[_format_value(v) for v in row] for row in self.rows]
        widths = [
            max(len(header), *(len(row[i]) for row in cells)) if cells else len(header)
            for i, header in enumerate(self.headers)
        ]
        lines = [self.title]
        lines.append("  ".join(h.ljust(w) for h, w in zip(self.headers, widths)))
        lines.append("  ".join("-" * w for w in widths))
        for row in cells:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, float):
        return "nan" if math.isnan(value) else format(value, ".4f")
    return str(value)


def _mean_or_nan(values: list[float]) -> float:
    finite = [v for v in values if not math.isnan(v)]
    return float(np.mean(finite)) if finite else math.nan


def summarize(rows: list[ReportRow], group_by: list[str]) -> SummaryTable:
    """Mean of every metric per group; error cells are counted, not averaged."""
    for axis in group_by:
        if axis not in GROUP_AXES:
            raise ValueError(f"unknown group axis {axis!r}; expected one of {GROUP_AXES}")
    groups: dict[tuple, list[ReportRow]] = {}
    for row in rows:
        key = tuple(getattr(row, axis) for axis in group_by)
        groups.setdefault(key, []).append(row)
    headers = list(group_by) + ["cells", "errors"] + [f"mean_{m}" for m in METRIC_FIELDS]
    table_rows = []
    for key in sorted(groups, key=lambda k: tuple(map(str, k))):
        members = groups[key]
        ok = [row for row in members if not row.error]
        record = list(key) + [len(members), len(members) - len(ok)]
        for metric in METRIC_FIELDS:
            record.append(_mean_or_nan([getattr(row, metric) for row in ok]))
        table_rows.append(record)
    return SummaryTable(
        title="mean metrics by " + ", ".join(group_by), headers=headers, rows=table_rows
    )


def detector_summary(rows: list[ReportRow], default_k: int = DEFAULT_K) -> SummaryTable:
    """Original vs smoothed AUC/F1 per detector, averaged over datasets.

    `default` uses the rows whose smoothing k equals ``default_k``; `best`
    takes each dataset's best smoothed AUC before averaging. The diff
    columns are against the original (unsmoothed) rows.
    """
    detectors = sorted({row.detector for row in rows if not row.error})
    headers = [
        "detector",
        "auc_original",
        "auc_smoothed_default",
        "auc_smoothed_best",
        "auc_diff_default",
        "auc_diff_best",
        "f1_arithmetic_original",
        "f1_arithmetic_smoothed_default",
        "f1_arithmetic_smoothed_best",
    ]
    table_rows = []
    for detector in detectors:
        mine = [row for row in rows if row.detector == detector and not row.error]
        datasets = sorted({row.dataset for row in mine})
        orig_auc, def_auc, best_auc = [], [], []
        orig_f1, def_f1, best_f1 = [], [], []
        for ds in datasets:
            cells = [row for row in mine if row.dataset == ds]
            off = [row for row in cells if row.smoothing_off]
            on = [row for row in cells if not row.smoothing_off]
            if off:
                orig_auc.append(_mean_or_nan([row.auc for row in off]))
                orig_f1.append(_mean_or_nan([row.f1_arithmetic for row in off]))
            default = [row for row in on if row.na_k == default_k]
            if default:
                def_auc.append(_mean_or_nan([row.auc for row in default]))
                def_f1.append(_mean_or_nan([row.f1_arithmetic for row in default]))
            if on:
                best = max(on, key=lambda row: row.auc)
                best_auc.append(best.auc)
                best_f1.append(best.f1_arithmetic)
        a_orig = _mean_or_nan(orig_auc)
        a_def = _mean_or_nan(def_auc)
        a_best = _mean_or_nan(best_auc)
        table_rows.append(
            [
                detector,
                a_orig,
                a_def,
                a_best,
                a_def - a_orig,
                a_best - a_orig,
                _mean_or_nan(orig_f1),
                _mean_or_nan(def_f1),
                _mean_or_nan(best_f1),
            ]
        )
    return SummaryTable(
        title="per-detector AUC and F1: original vs smoothed",
        headers=headers,
        rows=table_rows,
    )


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", text)


def cell_file_stem(key: tuple) -> str:
    dataset, detector, na_k, na_iterations = key
    return f"{_safe_name(dataset)}__{_safe_name(detector)}__k{na_k}__it{na_iterations}"


def emit_reports(
    rows: list[ReportRow],
    summaries: list[SummaryTable],
    output_dir: str | Path,
    config_hash: str = "",
    curves: dict[tuple, np.ndarray] | None = None,
    figure_kinds: tuple[str, ...] = (),
) -> list[Path]:
    """Write the raw report, summaries, ROC curves, figures, and a manifest.

    Returns the artifact paths (relative to ``output_dir``) in the order
    they appear in the manifest. Re-running with identical inputs produces
    the identical file set and manifest.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    artifacts: list[str] = []

    write_report_csv(rows, output_dir / "report.csv")
    artifacts.append("report.csv")

    for table in summaries:
        stem = _safe_name(table.title.replace(":", "").replace(",", "").replace(" ", "_"))
        table.to_csv(output_dir / f"{stem}.csv")
        (output_dir / f"{stem}.txt").write_text(table.to_text())
        artifacts.extend([f"{stem}.csv", f"{stem}.txt"])

    if curves:
        roc_dir = output_dir / "roc"
        roc_dir.mkdir(exist_ok=True)
        for key in sorted(curves, key=lambda k: tuple(map(str, k))):
            name = f"roc/{cell_file_stem(key)}.csv"
            roc_curve_to_csv(curves[key], output_dir / name)
            artifacts.append(name)

    if figure_kinds:
        from . import figures  # matplotlib import deferred until needed

        fig_dir = output_dir / "figures"
        fig_dir.mkdir(exist_ok=True)
        if "k" in figure_kinds:
            out = figures.plot_auc_vs_k(rows, fig_dir / "auc_vs_k.png")
            if out is not None:
                artifacts.append("figures/auc_vs_k.png")
        if "iterations" in figure_kinds:
            out = figures.plot_auc_vs_iterations(rows, fig_dir / "auc_vs_iterations.png")
            if out is not None:
                artifacts.append("figures/auc_vs_iterations.png")
        if "roc" in figure_kinds and curves:
            for ds in sorted({key[0] for key in curves}):
                ds_curves = {k: v for k, v in curves.items() if k[0] == ds}
                name = f"figures/roc_{_safe_name(ds)}.png"
                out = figures.plot_roc_overlay(ds, ds_curves, output_dir / name)
                if out is not None:
                    artifacts.append(name)

    manifest = {"config_hash": config_hash, "artifacts": sorted(artifacts)}
    (output_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    artifacts.append("manifest.json")
    return [Path(a) for a in artifacts]
