"""odsmooth: outlier-score smoothing over k-NN graphs, plus the machinery
to benchmark it — baseline detectors, exact neighbor search, ROC/AUC
evaluation, ensembles, and a config-driven experiment runner.
"""

from .dataset import Dataset, load_csv, save_csv, standardize, synth_clusters_with_outliers
from .neighbors import (
    NeighborGraph,
    dump_graph_csv,
    in_degree,
    knn_brute,
    knn_indexed,
)
from .detectors import (
    DETECTOR_NAMES,
    DetectorConfig,
    ScoreVector,
    abod_score,
    avg_knn_score,
    copod_score,
    iforest_score,
    knn_score,
    lof_score,
    make_config,
    mod_score,
    odin_score,
    pcad_score,
    run_detector,
)
from .smoothing import (
    SmoothingConfig,
    SmoothingResult,
    neighborhood_average,
    smooth,
)
from .ensemble import average_ensemble, normalize_scores
from .metrics import (
    EvalResult,
    evaluate_scores,
    precision_recall_f1,
    roc_auc,
    roc_curve,
    roc_curve_to_csv,
    top_k_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "load_csv",
    "save_csv",
    "standardize",
    "synth_clusters_with_outliers",
    "NeighborGraph",
    "knn_brute",
    "knn_indexed",
    "in_degree",
    "dump_graph_csv",
    "DETECTOR_NAMES",
    "DetectorConfig",
    "ScoreVector",
    "knn_score",
    "avg_knn_score",
    "odin_score",
    "lof_score",
    "mod_score",
    "abod_score",
    "iforest_score",
    "pcad_score",
    "copod_score",
    "run_detector",
    "make_config",
    "SmoothingConfig",
    "SmoothingResult",
    "neighborhood_average",
    "smooth",
    "average_ensemble",
    "normalize_scores",
    "EvalResult",
    "evaluate_scores",
    "roc_auc",
    "roc_curve",
    "roc_curve_to_csv",
    "top_k_threshold",
    "precision_recall_f1",
    "__version__",
]
