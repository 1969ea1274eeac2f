"""Decode output files: one TSV record per utterance.

Columns: id, detokenized text, summed log-probability, finished flag.
log_prob is written with shortest round-trip repr so a re-run of the
same experiment produces byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import DataError, FormatError

HEADER = ("id", "text", "log_prob", "finished")


@dataclass(frozen=True)
class DecodeRecord:
    utt_id: str
    text: str
    log_prob: float
    finished: bool


def write_decode_output(path: str | Path, records: list[DecodeRecord]) -> None:
    lines = ["\t".join(HEADER)]
    for rec in records:
        for field in (rec.utt_id, rec.text):
            if "\t" in field or "\n" in field:
                raise DataError(
                    f"decode record {rec.utt_id!r} contains tab or newline")
        lines.append("\t".join((rec.utt_id, rec.text, repr(rec.log_prob),
                                "1" if rec.finished else "0")))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_decode_output(path: str | Path) -> list[DecodeRecord]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != HEADER:
        raise FormatError(f"{path}: missing decode output header")
    records = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != len(HEADER):
            raise FormatError(
                f"{path}:{lineno}: expected {len(HEADER)} columns, "
                f"got {len(parts)}")
        utt_id, body, logp, finished = parts
        if finished not in ("0", "1"):
            raise FormatError(f"{path}:{lineno}: bad finished flag {finished!r}")
        try:
            log_prob = float(logp)
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad log_prob {logp!r}") from exc
        records.append(DecodeRecord(utt_id=utt_id, text=body,
                                    log_prob=log_prob, finished=finished == "1"))
    return records
