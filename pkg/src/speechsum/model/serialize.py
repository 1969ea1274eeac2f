"""Model checkpoint I/O on the named-tensor container format."""

from __future__ import annotations

from pathlib import Path

import torch

from ..corpus.features import read_named_tensors, write_named_tensors
from ..errors import FormatError
from .config import ModelConfig
from .network import SpeechSumModel


def save_model(path: str | Path, model: SpeechSumModel, stage: str = "",
               extra_meta: dict | None = None) -> None:
    entries = {name: tensor.detach().cpu().numpy()
               for name, tensor in model.state_dict().items()}
    meta = {"kind": "speechsum-model", "version": 1,
            "config": model.config.to_dict(), "stage": stage}
    if extra_meta:
        meta.update(extra_meta)
    write_named_tensors(path, entries, meta)


def load_model(path: str | Path) -> tuple[SpeechSumModel, dict]:
    entries, meta = read_named_tensors(path)
    if meta.get("kind") != "speechsum-model":
        raise FormatError(f"{path}: not a model checkpoint")
    config = ModelConfig.from_dict(meta["config"])
    model = SpeechSumModel(config)
    state = {name: torch.from_numpy(array.copy())
             for name, array in entries.items()}
    model.load_state_dict(state, strict=True)
    return model, meta
