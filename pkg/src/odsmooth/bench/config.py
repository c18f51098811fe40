"""Experiment configuration: INI-style files and their parsed form.

A config is one reproducible run. Example::

    [experiment]
    seed = 7
    output_dir = out

    [datasets]
    # <name> = <csv path> [label=<column name or 0-based index>]
    # <name> = synth n_inliers=<int> n_outliers=<int> dim=<int> spread=<float> seed=<int>
    blobs = synth n_inliers=400 n_outliers=20 dim=2 spread=1.0 seed=7
    wine  = data/wine.csv label=outlier

    [detectors]
    # <name> = <kind> [key=value ...]
    # kinds: knn avg_knn odin lof mod abod iforest pcad copod
    lof40 = lof k=40
    knn20 = knn k=20

    [na]
    # one variant per line: `off` or `k=<int> iterations=<int>`
    variants =
        off
        k=100 iterations=1

    [sweeps]
    k = 1:100
    iterations = 0:10

    [ensembles]
    # <name> = <detector name> <detector name> ...
    pair = lof40 knn20
"""

from __future__ import annotations

import configparser
import hashlib
import shlex
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..dataset import Dataset, load_csv, synth_clusters_with_outliers
from ..detectors import DetectorConfig
from ..smoothing import DEFAULT_ITERATIONS, DEFAULT_K, SmoothingConfig

DEFAULT_K_SWEEP = tuple(range(1, 101))
DEFAULT_ITERATION_SWEEP = tuple(range(0, 11))


@dataclass(frozen=True)
class DatasetSpec:
    """Where a dataset comes from: a CSV file or a synthetic generator call."""

    name: str
    path: str | None = None
    label_column: str | int | None = None
    synth: tuple[int, int, int, float, int] | None = None  # counts, dim, spread, seed

    def load(self) -> Dataset:
        if self.synth is not None:
            n_in, n_out, dim, spread, seed = self.synth
            data = synth_clusters_with_outliers(n_in, n_out, dim, spread, seed)
        else:
            data = load_csv(self.path, label_column=self.label_column)
        return Dataset(values=data.values, labels=data.labels, name=self.name)


@dataclass(frozen=True)
class DetectorSpec:
    name: str
    config: DetectorConfig
    seed_given: bool = False


@dataclass
class ExperimentConfig:
    datasets: list[DatasetSpec]
    detectors: list[DetectorSpec]
    na_variants: list[SmoothingConfig | None] = field(
        default_factory=lambda: [None, SmoothingConfig()]
    )
    k_sweep: tuple[int, ...] = DEFAULT_K_SWEEP
    iteration_sweep: tuple[int, ...] = DEFAULT_ITERATION_SWEEP
    ensembles: list[tuple[str, list[str]]] = field(default_factory=list)
    seed: int = 0
    output_dir: Path = Path("out")

    def __post_init__(self) -> None:
        if not self.datasets:
            raise ValueError("config needs at least one dataset")
        if not self.detectors:
            raise ValueError("config needs at least one detector")
        if not self.na_variants:
            raise ValueError("config needs at least one na variant (use `off`)")
        if not self.k_sweep or not self.iteration_sweep:
            raise ValueError("sweep ranges must be non-empty")
        names = {spec.name for spec in self.detectors}
        if len(names) != len(self.detectors):
            raise ValueError("detector names must be unique")
        for ens_name, members in self.ensembles:
            unknown = [m for m in members if m not in names]
            if unknown:
                raise ValueError(
                    f"ensemble {ens_name!r} references unknown detectors {unknown}"
                )
            if not members:
                raise ValueError(f"ensemble {ens_name!r} has no members")

    def content_hash(self) -> str:
        """Stable hash of everything that affects results (not output_dir)."""
        parts = [f"seed={self.seed}"]
        for spec in self.datasets:
            parts.append(
                f"dataset={spec.name}|{spec.path}|{spec.label_column}|{spec.synth}"
            )
        for det in self.detectors:
            parts.append(f"detector={det.name}|{det.config}|{det.seed_given}")
        for variant in self.na_variants:
            parts.append(f"na={variant}")
        parts.append(f"k_sweep={self.k_sweep}")
        parts.append(f"iteration_sweep={self.iteration_sweep}")
        for name, members in self.ensembles:
            parts.append(f"ensemble={name}|{','.join(members)}")
        return hashlib.sha256("\n".join(parts).encode()).hexdigest()


def _split_kv(tokens: list[str], context: str) -> dict[str, str]:
    out = {}
    for token in tokens:
        if "=" not in token:
            raise ValueError(f"{context}: expected key=value, got {token!r}")
        key, value = token.split("=", 1)
        out[key] = value
    return out


def _parse_dataset_line(name: str, line: str) -> DatasetSpec:
    tokens = shlex.split(line)
    if not tokens:
        raise ValueError(f"dataset {name!r}: empty definition")
    if tokens[0] == "synth":
        kv = _split_kv(tokens[1:], f"dataset {name!r}")
        required = ("n_inliers", "n_outliers", "dim", "spread", "seed")
        missing = [key for key in required if key not in kv]
        if missing:
            raise ValueError(f"dataset {name!r}: synth spec missing {missing}")
        unknown = sorted(set(kv) - set(required))
        if unknown:
            raise ValueError(f"dataset {name!r}: unknown synth keys {unknown}")
        return DatasetSpec(
            name=name,
            synth=(
                int(kv["n_inliers"]),
                int(kv["n_outliers"]),
                int(kv["dim"]),
                float(kv["spread"]),
                int(kv["seed"]),
            ),
        )
    kv = _split_kv(tokens[1:], f"dataset {name!r}")
    label = kv.pop("label", None)
    if kv:
        raise ValueError(f"dataset {name!r}: unknown keys {sorted(kv)}")
    if label is not None and label.lstrip("-").isdigit():
        label = int(label)
    return DatasetSpec(name=name, path=tokens[0], label_column=label)


_DETECTOR_INT_KEYS = ("k", "n_trees", "subsample", "mod_iterations", "seed")


def _parse_detector_line(name: str, line: str) -> DetectorSpec:
    tokens = shlex.split(line)
    if not tokens:
        raise ValueError(f"detector {name!r}: empty definition")
    kind = tokens[0]
    kv = _split_kv(tokens[1:], f"detector {name!r}")
    kwargs: dict = {}
    for key, value in kv.items():
        if key in _DETECTOR_INT_KEYS:
            kwargs[key] = int(value)
        elif key == "variance_fraction":
            kwargs[key] = float(value)
        else:
            raise ValueError(f"detector {name!r}: unknown key {key!r}")
    config = replace(DetectorConfig(detector=kind), **kwargs)
    return DetectorSpec(name=name, config=config, seed_given="seed" in kv)


def _parse_na_variant(line: str) -> SmoothingConfig | None:
    if line.strip() == "off":
        return None
    kv = _split_kv(shlex.split(line), f"na variant {line!r}")
    k = int(kv.pop("k", DEFAULT_K))
    iterations = int(kv.pop("iterations", DEFAULT_ITERATIONS))
    reuse = kv.pop("reuse_graph", "true").lower() in ("1", "true", "yes")
    if kv:
        raise ValueError(f"na variant {line!r}: unknown keys {sorted(kv)}")
    return SmoothingConfig(k=k, iterations=iterations, reuse_graph=reuse)


def _parse_sweep(text: str, context: str) -> tuple[int, ...]:
    text = text.strip()
    if ":" in text:
        lo, hi = text.split(":", 1)
        values = tuple(range(int(lo), int(hi) + 1))
    else:
        values = tuple(int(tok) for tok in text.replace(",", " ").split())
    if not values:
        raise ValueError(f"{context}: empty sweep")
    return values


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse an experiment config file; see the module docstring for the format."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such config file: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str  # dataset/detector names are case-sensitive
    parser.read(path)

    datasets = [
        _parse_dataset_line(name, line)
        for name, line in (parser["datasets"].items() if "datasets" in parser else ())
    ]
    detectors = [
        _parse_detector_line(name, line)
        for name, line in (parser["detectors"].items() if "detectors" in parser else ())
    ]

    kwargs: dict = {}
    if "na" in parser and parser["na"].get("variants"):
        lines = [ln for ln in parser["na"]["variants"].splitlines() if ln.strip()]
        kwargs["na_variants"] = [_parse_na_variant(ln) for ln in lines]
    if "sweeps" in parser:
        if parser["sweeps"].get("k"):
            kwargs["k_sweep"] = _parse_sweep(parser["sweeps"]["k"], "sweeps.k")
        if parser["sweeps"].get("iterations"):
            kwargs["iteration_sweep"] = _parse_sweep(
                parser["sweeps"]["iterations"], "sweeps.iterations"
            )
    if "ensembles" in parser:
        kwargs["ensembles"] = [
            (name, shlex.split(line)) for name, line in parser["ensembles"].items()
        ]
    if "experiment" in parser:
        section = parser["experiment"]
        if section.get("seed"):
            kwargs["seed"] = section.getint("seed")
        if section.get("output_dir"):
            kwargs["output_dir"] = Path(section["output_dir"])

    return ExperimentConfig(datasets=datasets, detectors=detectors, **kwargs)
