"""Success plots and AUC for single-object tracking.

A frame counts as a success at threshold ``t`` when its IoU is strictly
greater than ``t``. On the default 21-point grid (0, 0.05, ..., 1.0) the
threshold 1.0 can never be exceeded, so a perfect tracker scores 20/21.
Dataset scores average per-sequence AUCs uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INEQUALITY = "strict (iou > threshold)"
AGGREGATION = "per-sequence AUC, uniform mean over sequences"


def default_thresholds() -> tuple[float, ...]:
    # integer grid avoids 0.1 + 0.2 style drift
    return tuple(i / 20 for i in range(21))


@dataclass(frozen=True)
class SuccessCurve:
    thresholds: tuple[float, ...]
    precision: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.thresholds) != len(self.precision):
            raise ValueError("thresholds and precision differ in length")
        if any(b <= a for a, b in zip(self.thresholds, self.thresholds[1:])):
            raise ValueError("thresholds must be strictly increasing")


def _check_ious(ious: Sequence[float]) -> np.ndarray:
    arr = np.asarray(list(ious), dtype=float)
    if arr.size == 0:
        raise ValueError("cannot score an empty IoU list")
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > 1):
        raise ValueError("IoU values must lie in [0, 1]")
    return arr


def precision_at(ious: Sequence[float], threshold: float) -> float:
    arr = _check_ious(ious)
    return float(np.count_nonzero(arr > threshold)) / arr.size


def success_curve(ious: Sequence[float], thresholds: Sequence[float] | None = None) -> SuccessCurve:
    arr = _check_ious(ious)
    grid = tuple(thresholds) if thresholds is not None else default_thresholds()
    prec = tuple(float(np.count_nonzero(arr > t)) / arr.size for t in grid)
    return SuccessCurve(grid, prec)


def auc(curve: SuccessCurve) -> float:
    return math.fsum(curve.precision) / len(curve.precision)


def sequence_auc(ious: Sequence[float]) -> float:
    return auc(success_curve(ious))


def dataset_auc(per_sequence: Iterable[Sequence[float]]) -> float:
    scores = [sequence_auc(ious) for ious in per_sequence]
    if not scores:
        raise ValueError("no sequences to score")
    return math.fsum(scores) / len(scores)
