"""Cepstral mean-variance normalization over speech-modality utterances."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, TYPE_CHECKING

import numpy as np

from ..errors import DataError, ShapeError

if TYPE_CHECKING:
    from .manifest import Utterance

# Population variance is floored so constant dimensions normalize to zero
# instead of dividing by zero.
VARIANCE_FLOOR = 1e-8


@dataclass
class CmvnStats:
    mean: np.ndarray
    variance: np.ndarray  # population variance, floored at VARIANCE_FLOOR
    count: int

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "mean": self.mean.tolist(),
                    "variance": self.variance.tolist(),
                    "count": self.count,
                },
                f,
            )

    @classmethod
    def load(cls, path: str | Path) -> "CmvnStats":
        try:
            with open(path, encoding="utf-8") as f:
                d = json.load(f)
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        return cls(
            mean=np.asarray(d["mean"], dtype=np.float64),
            variance=np.asarray(d["variance"], dtype=np.float64),
            count=int(d["count"]),
        )


def compute_cmvn_stats(dataset: Iterable["Utterance"]) -> CmvnStats:
    """Accumulate per-dimension mean and population variance over all frames.

    Only speech-modality utterances contribute; at least one is required.
    """
    total = None
    total_sq = None
    count = 0
    for utt in dataset:
        if utt.modality != "speech":
            continue
        feats = utt.load_features().astype(np.float64)
        if total is None:
            total = feats.sum(axis=0)
            total_sq = (feats**2).sum(axis=0)
        else:
            if feats.shape[1] != total.shape[0]:
                raise ShapeError(
                    f"utterance {utt.id}: {feats.shape[1]} dims, expected {total.shape[0]}"
                )
            total += feats.sum(axis=0)
            total_sq += (feats**2).sum(axis=0)
        count += feats.shape[0]
    if total is None or count == 0:
        raise DataError("no speech-modality frames to compute CMVN stats from")
    mean = total / count
    variance = np.maximum(total_sq / count - mean**2, VARIANCE_FLOOR)
    return CmvnStats(mean=mean, variance=variance, count=count)


def apply_cmvn(features: np.ndarray, stats: CmvnStats) -> np.ndarray:
    """Standardize features as (x - mean) / sqrt(variance), per dimension."""
    feats = np.asarray(features)
    if feats.ndim != 2 or feats.shape[1] != stats.mean.shape[0]:
        raise ShapeError(
            f"feature shape {feats.shape} does not match {stats.mean.shape[0]}-dim stats"
        )
    out = (feats - stats.mean) / np.sqrt(stats.variance)
    return out.astype(np.float32)
