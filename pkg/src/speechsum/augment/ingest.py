"""Feature-ingest plug for externally synthesized speech.

Any synthesizer (TTS tool, the toy renderer, ...) that writes SSF1
feature files can feed training: this module normalizes those files
with provided CMVN stats and wraps them as role=ext speech utterances.
A command-template runner is provided so external tools stay fully
decoupled from this package.
"""

from __future__ import annotations

import shlex
import subprocess
from pathlib import Path
from typing import Sequence

from ..corpus.cmvn import CmvnStats, apply_cmvn
from ..corpus.features import read_features
from ..corpus.manifest import Utterance
from ..errors import DataError


def ingest_external_features(feature_paths: Sequence[str | Path], stats: CmvnStats,
                             summaries: Sequence[str]) -> list[Utterance]:
    """Load, CMVN-normalize, and wrap externally produced feature files.

    Utterance ids are the file stems; features are kept in memory with
    pre_normalized set, so downstream batching will not normalize again.
    """
    if len(feature_paths) != len(summaries):
        raise DataError(
            f"{len(feature_paths)} feature files but {len(summaries)} summaries")
    utterances: list[Utterance] = []
    for path, summary in zip(feature_paths, summaries):
        path = Path(path)
        feats = apply_cmvn(read_features(path), stats)
        utt = Utterance(id=path.stem, modality="speech", role="ext",
                        num_frames=feats.shape[0], transcript="", summary=summary,
                        feat_path=str(path), features=feats, pre_normalized=True)
        utt.validate()
        utterances.append(utt)
    return utterances


def run_synthesizer(command_template: str, texts: Sequence[str],
                    out_paths: Sequence[str | Path]) -> None:
    """Invoke an external synthesizer once per text.

    The template must contain {text} and {out} placeholders; each run
    is expected to write an SSF1 feature file to {out}.
    """
    if "{text}" not in command_template or "{out}" not in command_template:
        raise DataError("synthesizer template needs {text} and {out} placeholders")
    if len(texts) != len(out_paths):
        raise DataError(f"{len(texts)} texts but {len(out_paths)} output paths")
    for text, out in zip(texts, out_paths):
        argv = [
            part.replace("{text}", text).replace("{out}", str(out))
            for part in shlex.split(command_template)
        ]
        proc = subprocess.run(argv, capture_output=True, text=True)
        if proc.returncode != 0:
            raise DataError(
                f"synthesizer failed for output {out}: {proc.stderr.strip()[:500]}")
        if not Path(out).exists():
            raise DataError(f"synthesizer did not write {out}")
