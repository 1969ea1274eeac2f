"""Stochastic phoneme repetition and augmented-set construction.

A phoneme sequence becomes a frame-rate stand-in for speech by
repeating each phoneme n times, n drawn from N(mu_p, sigma_p), rounded
to nearest and clamped to >= 1. Word-boundary symbols keep a fixed run
length (default 1).
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from ..corpus.manifest import DEFAULT_FRAME_CAP, Utterance
from ..errors import DataError
from .duration import DurationTable
from .g2p import PhonemeSequence, g2p
from .inventory import DEFAULT_INVENTORY, PhonemeInventory


@dataclass
class RepeatedPhonemeSequence:
    """Flattened repeated ids plus the run length of each source phoneme."""

    ids: tuple[int, ...]
    run_lengths: tuple[int, ...]


def repeat_phonemes(seq: PhonemeSequence, table: DurationTable,
                    seed: int | np.random.SeedSequence,
                    inventory: PhonemeInventory = DEFAULT_INVENTORY,
                    boundary_run: int = 1) -> RepeatedPhonemeSequence:
    rng = np.random.default_rng(seed)
    ids: list[int] = []
    runs: list[int] = []
    for pid in seq.ids:
        name = inventory.name_of(pid)
        if pid == inventory.pad_id:
            raise DataError("pad id has no duration; cannot repeat")
        if pid == inventory.wb_id:
            n = boundary_run
        else:
            mu, sigma = table.get(name)
            n = max(1, int(math.floor(rng.normal(mu, sigma) + 0.5)))
        ids.extend([pid] * n)
        runs.append(n)
    return RepeatedPhonemeSequence(ids=tuple(ids), run_lengths=tuple(runs))


def collapse_runs(rep: RepeatedPhonemeSequence) -> tuple[int, ...]:
    """Invert repeat_phonemes: first id of each run, in order."""
    out: list[int] = []
    offset = 0
    for run in rep.run_lengths:
        out.append(rep.ids[offset])
        offset += run
    if offset != len(rep.ids):
        raise DataError("run lengths do not cover the repeated sequence")
    return tuple(out)


def pair_seed(global_seed: int, pair_id: str) -> np.random.SeedSequence:
    """Stable per-pair seed so serial and parallel builds agree."""
    return np.random.SeedSequence([global_seed, zlib.crc32(pair_id.encode("utf-8"))])


@dataclass
class AugmentedSet:
    utterances: list[Utterance]
    skipped_ids: list[str]

    @property
    def n_skipped(self) -> int:
        return len(self.skipped_ids)


def build_augmented_set(external_pairs, lexicon: dict[str, tuple[str, ...]],
                        table: DurationTable, seed: int,
                        inventory: PhonemeInventory = DEFAULT_INVENTORY,
                        boundary_run: int = 1,
                        frame_cap: int = DEFAULT_FRAME_CAP) -> AugmentedSet:
    """Turn text pairs into phoneme-modality utterances (role ext).

    Empty documents are skipped and reported in the result metadata.
    """
    utterances: list[Utterance] = []
    skipped: list[str] = []
    for pair in external_pairs:
        if not pair.document.split():
            skipped.append(pair.id)
            continue
        seq = g2p(lexicon, pair.document, inventory)
        rep = repeat_phonemes(seq, table, pair_seed(seed, pair.id), inventory, boundary_run)
        ids = rep.ids[:frame_cap]
        utt = Utterance(id=pair.id, modality="phoneme", role="ext",
                        num_frames=len(ids), transcript=pair.document,
                        summary=pair.summary, phoneme_ids=ids)
        utt.validate(frame_cap=frame_cap, inventory_size=inventory.size)
        utterances.append(utt)
    return AugmentedSet(utterances=utterances, skipped_ids=skipped)
