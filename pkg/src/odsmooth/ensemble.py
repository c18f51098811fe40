"""Average ensembles over several detectors' score vectors.

Raw detector scales differ by orders of magnitude, so members are z-scored
by default before averaging; pass ``normalization="none"`` to average raw
values.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .detectors import ScoreVector

NORMALIZATIONS = ("zscore", "none")


def normalize_scores(scores: ScoreVector) -> ScoreVector:
    """Z-score a vector (population sigma); constant vectors map to zeros."""
    values = scores.scores
    sigma = values.std()
    if sigma == 0.0:
        normalized = np.zeros_like(values)
    else:
        normalized = (values - values.mean()) / sigma
    return ScoreVector(
        scores=normalized,
        detector_id=scores.detector_id,
        params={**scores.params, "normalized": "zscore"},
    )


def average_ensemble(
    members: Sequence[ScoreVector], normalization: str = "zscore"
) -> ScoreVector:
    """Per-object arithmetic mean of the members' (optionally z-scored) scores."""
    if len(members) < 1:
        raise ValueError("ensemble needs at least one member")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    n = len(members[0])
    for member in members[1:]:
        if len(member) != n:
            raise ValueError(
                f"member {member.detector_id!r} has {len(member)} scores, expected {n}"
            )
    if len(members) == 1 and normalization == "none":
        return members[0]
    if normalization == "zscore":
        stacked = np.stack([normalize_scores(m).scores for m in members])
    else:
        stacked = np.stack([m.scores for m in members])
    return ScoreVector(
        scores=stacked.mean(axis=0),
        detector_id="avg(" + ",".join(m.detector_id for m in members) + ")",
        params={"members": [m.detector_id for m in members], "normalization": normalization},
    )
