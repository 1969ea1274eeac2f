"""Utterance records and tab-separated manifest I/O.

A manifest row has seven columns:

    id  modality  role  num_frames  source  transcript  summary

where ``source`` is a feature-file path for speech utterances (stored
relative to the manifest) and a comma-separated phoneme-id list for
phoneme utterances. Text columns must not contain tabs or newlines.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..errors import DataError
from .features import read_features

MODALITIES = ("speech", "phoneme")
ROLES = ("asr", "sum", "ext")
DEFAULT_FRAME_CAP = 10000


def _check_text(value: str, what: str) -> str:
    if "\t" in value or "\n" in value or "\r" in value:
        raise DataError(f"{what} contains tab or newline characters")
    return value


@dataclass
class Utterance:
    """One training or evaluation item in either input modality."""

    id: str
    modality: str
    role: str
    num_frames: int
    transcript: str
    summary: str
    feat_path: str | None = None
    features: np.ndarray | None = field(default=None, repr=False)
    phoneme_ids: tuple[int, ...] | None = None
    # in-memory only: features already CMVN-normalized (ingest path)
    pre_normalized: bool = False

    def validate(self, frame_cap: int = DEFAULT_FRAME_CAP,
                 inventory_size: int | None = None) -> None:
        if self.modality not in MODALITIES:
            raise DataError(f"{self.id}: unknown modality {self.modality!r}")
        if self.role not in ROLES:
            raise DataError(f"{self.id}: unknown role {self.role!r}")
        if self.num_frames < 1:
            raise DataError(f"{self.id}: num_frames must be positive")
        if self.num_frames > frame_cap:
            raise DataError(
                f"{self.id}: {self.num_frames} frames exceeds cap {frame_cap}")
        if self.modality == "speech":
            if self.feat_path is None and self.features is None:
                raise DataError(f"{self.id}: speech utterance lacks features")
            if self.features is not None and self.features.shape[0] != self.num_frames:
                raise DataError(
                    f"{self.id}: num_frames={self.num_frames} but feature "
                    f"matrix has {self.features.shape[0]} rows")
        else:
            if self.phoneme_ids is None:
                raise DataError(f"{self.id}: phoneme utterance lacks ids")
            if self.features is not None:
                raise DataError(f"{self.id}: phoneme utterance carries features")
            if len(self.phoneme_ids) != self.num_frames:
                raise DataError(
                    f"{self.id}: num_frames={self.num_frames} but "
                    f"{len(self.phoneme_ids)} phoneme ids")
            if inventory_size is not None:
                for pid in self.phoneme_ids:
                    if pid < 0 or pid >= inventory_size:
                        raise DataError(
                            f"{self.id}: phoneme id {pid} outside inventory "
                            f"of size {inventory_size}")

    def load_features(self) -> np.ndarray:
        if self.modality != "speech":
            raise DataError(f"{self.id}: phoneme utterances have no features")
        if self.features is not None:
            return self.features
        assert self.feat_path is not None
        return read_features(self.feat_path)


def with_role(utterances: list[Utterance], role: str) -> list[Utterance]:
    """Copies of the utterances retagged with another role."""
    if role not in ROLES:
        raise DataError(f"unknown role {role!r}")
    return [replace(utt, role=role) for utt in utterances]


def write_manifest(path: str | Path, utterances: list[Utterance]) -> None:
    path = Path(path)
    base = path.parent
    lines = []
    for utt in utterances:
        utt.validate()
        if utt.modality == "speech":
            if utt.feat_path is None:
                raise DataError(f"{utt.id}: cannot write manifest row without feat_path")
            feat = Path(utt.feat_path)
            try:
                source = feat.relative_to(base).as_posix()
            except ValueError:
                source = feat.as_posix()
        else:
            source = ",".join(str(p) for p in utt.phoneme_ids or ())
        fields = [
            _check_text(utt.id, "utterance id"),
            utt.modality,
            utt.role,
            str(utt.num_frames),
            _check_text(source, "source"),
            _check_text(utt.transcript, f"{utt.id} transcript"),
            _check_text(utt.summary, f"{utt.id} summary"),
        ]
        lines.append("\t".join(fields))
    path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_manifest(path: str | Path) -> list[Utterance]:
    path = Path(path)
    base = path.parent
    utterances: list[Utterance] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise DataError(f"{path}:{lineno}: expected 7 columns, got {len(fields)}")
        uid, modality, role, frames_s, source, transcript, summary = fields
        try:
            num_frames = int(frames_s)
        except ValueError:
            raise DataError(f"{path}:{lineno}: bad num_frames {frames_s!r}") from None
        feat_path = None
        phoneme_ids = None
        if modality == "speech":
            feat_path = str((base / source).resolve()) if source else None
        else:
            try:
                phoneme_ids = tuple(int(tok) for tok in source.split(",") if tok != "")
            except ValueError:
                raise DataError(f"{path}:{lineno}: bad phoneme ids {source!r}") from None
        utt = Utterance(id=uid, modality=modality, role=role, num_frames=num_frames,
                        transcript=transcript, summary=summary,
                        feat_path=feat_path, phoneme_ids=phoneme_ids)
        utt.validate()
        utterances.append(utt)
    return utterances


@dataclass
class ExternalPair:
    """A text-only document/summary pair with no recorded audio."""

    id: str
    document: str
    summary: str


def write_external_pairs(path: str | Path, pairs: list[ExternalPair]) -> None:
    lines = []
    for pair in pairs:
        lines.append("\t".join([
            _check_text(pair.id, "pair id"),
            _check_text(pair.document, f"{pair.id} document"),
            _check_text(pair.summary, f"{pair.id} summary"),
        ]))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_external_pairs(path: str | Path) -> list[ExternalPair]:
    pairs: list[ExternalPair] = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 columns, got {len(fields)}")
        pairs.append(ExternalPair(id=fields[0], document=fields[1], summary=fields[2]))
    return pairs
