"""Benchmark harness: experiment configs, the runner, reports, and figures."""

from .config import DatasetSpec, DetectorSpec, ExperimentConfig, load_config
from .report import (
    ReportRow,
    SummaryTable,
    detector_summary,
    emit_reports,
    read_report_csv,
    summarize,
    write_report_csv,
)
from .runner import RunResult, run_experiment, sweep_iterations, sweep_k

__all__ = [
    "DatasetSpec",
    "DetectorSpec",
    "ExperimentConfig",
    "load_config",
    "ReportRow",
    "SummaryTable",
    "detector_summary",
    "emit_reports",
    "read_report_csv",
    "summarize",
    "write_report_csv",
    "RunResult",
    "run_experiment",
    "sweep_iterations",
    "sweep_k",
]
