"""Batch composition.

Batches never mix input modalities, and never mix real samples (roles
asr/sum) with artificial ones (role ext). Two packing rules: fixed item
count, or a total-frame cap with length-sorted greedy packing where an
oversized item becomes a singleton batch.
"""

from __future__ import annotations

import numpy as np

from ..augment.repeat import pair_seed
from ..corpus.manifest import Utterance
from ..errors import ConfigurationError, DataError

BATCH_RULES = ("fixed_count", "max_total_length")


def _origin(utt: Utterance) -> str:
    return "ext" if utt.role == "ext" else "real"


def _pack_fixed(group: list[Utterance], count: int,
                rng: np.random.Generator) -> list[list[Utterance]]:
    order = rng.permutation(len(group))
    shuffled = [group[i] for i in order]
    return [shuffled[i:i + count] for i in range(0, len(shuffled), count)]


def _pack_capped(group: list[Utterance], cap: int) -> list[list[Utterance]]:
    ordered = sorted(group, key=lambda u: (u.num_frames, u.id))
    batches: list[list[Utterance]] = []
    current: list[Utterance] = []
    total = 0
    for utt in ordered:
        if current and total + utt.num_frames > cap:
            batches.append(current)
            current = []
            total = 0
        current.append(utt)
        total += utt.num_frames
    if current:
        batches.append(current)
    return batches


def make_batches(dataset: list[Utterance], rule: str, cap_or_count: int,
                 seed: int) -> list[list[Utterance]]:
    if rule not in BATCH_RULES:
        raise ConfigurationError(f"unknown batch rule {rule!r}")
    if cap_or_count < 1:
        raise ConfigurationError(f"cap_or_count must be >= 1, got {cap_or_count}")
    if not dataset:
        raise DataError("cannot batch an empty dataset")

    groups: dict[tuple[str, str], list[Utterance]] = {}
    for utt in dataset:
        groups.setdefault((utt.modality, _origin(utt)), []).append(utt)

    batches: list[list[Utterance]] = []
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda u: u.id)
        if rule == "fixed_count":
            rng = np.random.default_rng(pair_seed(seed, f"group:{key[0]}:{key[1]}"))
            batches.extend(_pack_fixed(group, cap_or_count, rng))
        else:
            batches.extend(_pack_capped(group, cap_or_count))
    rng = np.random.default_rng(pair_seed(seed, "batch-order"))
    return [batches[i] for i in rng.permutation(len(batches))]
