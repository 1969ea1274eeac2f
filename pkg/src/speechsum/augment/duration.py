"""Per-phoneme frame-duration statistics.

Each phoneme carries a (mean, std-dev) pair in frames; phonemes
missing from the table fall back to configurable defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import DataError

DEFAULT_MEAN = 8.0
DEFAULT_STD = 2.0


@dataclass
class DurationTable:
    entries: dict[str, tuple[float, float]] = field(default_factory=dict)
    default_mean: float = DEFAULT_MEAN
    default_std: float = DEFAULT_STD

    def __post_init__(self) -> None:
        for name, (mu, sigma) in self.entries.items():
            if mu <= 0 or sigma < 0:
                raise DataError(f"duration entry {name!r}: need mu > 0 and sigma >= 0")
        if self.default_mean <= 0 or self.default_std < 0:
            raise DataError("duration defaults: need mu > 0 and sigma >= 0")

    def get(self, name: str) -> tuple[float, float]:
        return self.entries.get(name, (self.default_mean, self.default_std))

    def save(self, path: str | Path) -> None:
        lines = [f"{name}\t{mu:.6g}\t{sigma:.6g}"
                 for name, (mu, sigma) in sorted(self.entries.items())]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, default_mean: float = DEFAULT_MEAN,
             default_std: float = DEFAULT_STD) -> "DurationTable":
        entries: dict[str, tuple[float, float]] = {}
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise DataError(f"{path}:{lineno}: expected 'name<TAB>mu<TAB>sigma'")
            try:
                entries[parts[0]] = (float(parts[1]), float(parts[2]))
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric duration entry") from None
        return cls(entries=entries, default_mean=default_mean, default_std=default_std)


def estimate_duration_table(aligned_corpus: Iterable[tuple[str, int]],
                            default_mean: float = DEFAULT_MEAN,
                            default_std: float = DEFAULT_STD) -> DurationTable:
    """Estimate per-phoneme mean and population std-dev of frame lengths.

    ``aligned_corpus`` yields (phoneme name, frame length) pairs; unseen
    phonemes keep the defaults.
    """
    sums: dict[str, float] = {}
    sq_sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for name, length in aligned_corpus:
        if length <= 0:
            raise DataError(f"non-positive frame length {length} for phoneme {name!r}")
        sums[name] = sums.get(name, 0.0) + length
        sq_sums[name] = sq_sums.get(name, 0.0) + float(length) ** 2
        counts[name] = counts.get(name, 0) + 1
    entries: dict[str, tuple[float, float]] = {}
    for name, n in counts.items():
        mean = sums[name] / n
        var = max(sq_sums[name] / n - mean * mean, 0.0)
        entries[name] = (mean, math.sqrt(var))
    return DurationTable(entries=entries, default_mean=default_mean, default_std=default_std)
