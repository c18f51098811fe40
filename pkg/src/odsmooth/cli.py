"""Command-line interface: run experiments, sweep parameters, summarize reports.

Subcommands::

    odsmooth run <config>               full dataset x detector x smoothing grid
    odsmooth sweep-k <config>           smoothing neighborhood-size sweep
    odsmooth sweep-iterations <config>  smoothing iteration-count sweep
    odsmooth summarize <report.csv>     group-by means from an existing report

Exit status is nonzero when any cell of a run failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench.config import load_config
from .bench.report import detector_summary, emit_reports, read_report_csv, summarize
from .bench.runner import RunResult, run_experiment, sweep_iterations, sweep_k


def _add_run_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="experiment config file (INI format)")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--output-dir", type=Path, default=None, help="override the config output dir"
    )
    parser.add_argument(
        "--jobs", type=int, default=1, help="datasets to process in parallel"
    )


def _finish_run(result: RunResult, output_dir: Path, figure_kinds: tuple[str, ...]) -> int:
    rows = result.rows
    summaries = [
        summarize(rows, ["detector"]),
        summarize(rows, ["dataset"]),
        detector_summary(rows),
    ]
    emit_reports(
        rows,
        summaries,
        output_dir,
        config_hash=result.config_hash,
        curves=result.curves,
        figure_kinds=figure_kinds,
    )
    print(summaries[2].to_text())
    errors = [row for row in rows if row.error]
    for row in errors:
        print(
            f"error: dataset={row.dataset} detector={row.detector}: {row.error}",
            file=sys.stderr,
        )
    print(f"wrote {output_dir}/report.csv ({len(rows)} rows, {len(errors)} errors)")
    return 1 if errors else 0


def _cmd_grid(args: argparse.Namespace, mode: str) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    if mode == "run":
        result = run_experiment(config, jobs=args.jobs)
        kinds: tuple[str, ...] = ("roc",)
    elif mode == "sweep-k":
        result = sweep_k(config, jobs=args.jobs)
        kinds = ("k",)
    else:
        result = sweep_iterations(config, jobs=args.jobs)
        kinds = ("iterations",)
    return _finish_run(result, config.output_dir, kinds)


def _cmd_summarize(args: argparse.Namespace) -> int:
    rows = read_report_csv(args.report)
    axes = [axis.strip() for axis in args.group_by.split(",") if axis.strip()]
    tables = [summarize(rows, axes), detector_summary(rows)]
    for table in tables:
        print(table.to_text())
    if args.output_dir is not None:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        for table in tables:
            stem = table.title.replace(" ", "_").replace(",", "")
            table.to_csv(args.output_dir / f"{stem}.csv")
            (args.output_dir / f"{stem}.txt").write_text(table.to_text())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odsmooth",
        description="outlier detector benchmarking with k-NN score smoothing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run the configured experiment grid")
    _add_run_arguments(run_parser)

    sweepk_parser = sub.add_parser("sweep-k", help="sweep the smoothing neighborhood size")
    _add_run_arguments(sweepk_parser)

    sweepit_parser = sub.add_parser(
        "sweep-iterations", help="sweep the smoothing iteration count"
    )
    _add_run_arguments(sweepit_parser)

    sum_parser = sub.add_parser("summarize", help="summarize an existing report CSV")
    sum_parser.add_argument("report", help="report.csv produced by a run")
    sum_parser.add_argument(
        "--group-by",
        default="detector",
        help="comma-separated axes: dataset, detector, na_k, na_iterations",
    )
    sum_parser.add_argument("--output-dir", type=Path, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "summarize":
        return _cmd_summarize(args)
    return _cmd_grid(args, args.command)


if __name__ == "__main__":
    sys.exit(main())
