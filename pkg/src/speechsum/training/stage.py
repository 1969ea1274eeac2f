"""Stage runner for the three-step protocol: ASR pretraining on
transcripts, summarization fine-tuning, and augmented fine-tuning that
mixes real and artificial samples.

Each stage owns an Adam optimizer (betas 0.9/0.98, eps 1e-9) with one
parameter group per top-level module so the decoder and the phoneme
pre-encoder can run at their own learning rates; optimizer moments are
reset at stage boundaries.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch

from ..corpus.bpe import EOS_ID, PAD_ID, SOS_ID, BpeModel, bpe_encode
from ..corpus.cmvn import CmvnStats, apply_cmvn
from ..corpus.manifest import Utterance
from ..errors import ConfigurationError, DataError, RangeError
from ..model.network import ModelBatch, SpeechSumModel
from .batching import make_batches
from .schedulers import noam_lr, plateau_lr

STAGES = ("asr", "ssum", "augmented")
SCHEDULERS = ("noam_warmup", "plateau")

# stage -> (required dataset roles, required target field)
STAGE_PROFILE = {
    "asr": (frozenset({"asr"}), "transcript"),
    "ssum": (frozenset({"sum"}), "summary"),
    "augmented": (frozenset({"sum", "ext"}), "summary"),
}

ADAM_BETAS = (0.9, 0.98)
ADAM_EPS = 1e-9


@dataclass
class StageConfig:
    stage: str
    dataset_roles: frozenset[str]
    target_field: str
    base_lr: float
    per_module_lr: dict[str, float] = field(default_factory=dict)
    scheduler: str = "noam_warmup"
    warmup_steps: int = 1000
    plateau_factor: float = 0.5
    plateau_patience: int = 0
    batch_rule: str = "fixed_count"
    batch_size_or_cap: int = 32
    weight_decay: float = 0.0
    max_epochs: int = 10
    seed: int = 0

    def validate(self) -> None:
        if self.stage not in STAGES:
            raise ConfigurationError(f"unknown stage {self.stage!r}")
        roles, target = STAGE_PROFILE[self.stage]
        if frozenset(self.dataset_roles) != roles:
            raise ConfigurationError(
                f"stage {self.stage!r} requires dataset roles "
                f"{sorted(roles)}, got {sorted(self.dataset_roles)}")
        if self.target_field != target:
            raise ConfigurationError(
                f"stage {self.stage!r} requires target {target!r}, "
                f"got {self.target_field!r}")
        if self.base_lr <= 0:
            raise ConfigurationError(f"base_lr must be > 0, got {self.base_lr}")
        for name, lr in self.per_module_lr.items():
            if lr < 0:
                raise ConfigurationError(f"per-module lr for {name!r} is negative")
        if self.scheduler not in SCHEDULERS:
            raise ConfigurationError(f"unknown scheduler {self.scheduler!r}")
        if self.warmup_steps < 1:
            raise ConfigurationError("warmup_steps must be >= 1")
        if not 0.0 < self.plateau_factor < 1.0:
            raise ConfigurationError("plateau_factor must be in (0,1)")
        if self.plateau_patience < 0:
            raise ConfigurationError("plateau_patience must be >= 0")
        if self.batch_size_or_cap < 1:
            raise ConfigurationError("batch_size_or_cap must be >= 1")
        if self.weight_decay < 0:
            raise ConfigurationError("weight_decay must be >= 0")
        if self.max_epochs < 0:
            raise ConfigurationError("max_epochs must be >= 0")


@dataclass
class Checkpoint:
    model_state: dict
    optimizer_state: dict | None
    epoch: int
    validation_accuracy: float
    stage: str


@dataclass
class EpochRecord:
    epoch: int
    loss: float
    val_accuracy: float
    lr: float


@dataclass
class TrainResult:
    history: list[EpochRecord]
    checkpoints: list[Checkpoint]
    final: Checkpoint


def _target_text(utt: Utterance, target_field: str) -> str:
    text = utt.transcript if target_field == "transcript" else utt.summary
    if not text:
        raise DataError(f"utterance {utt.id!r} lacks a {target_field}")
    return text


def assemble_batch(utterances: list[Utterance], bpe: BpeModel,
                   target_field: str, stats: CmvnStats | None,
                   max_target_len: int,
                   phoneme_pad_id: int = 0) -> ModelBatch:
    """Pad one modality-pure batch into tensors with sos/eos targets."""
    if not utterances:
        raise DataError("cannot assemble an empty batch")
    modality = utterances[0].modality
    lengths = torch.tensor([u.num_frames for u in utterances], dtype=torch.long)

    rows = []
    for utt in utterances:
        ids = bpe_encode(bpe, _target_text(utt, target_field))
        if len(ids) + 2 > max_target_len:
            raise RangeError(
                f"utterance {utt.id!r} target needs {len(ids) + 2} positions, "
                f"max_target_len is {max_target_len}")
        rows.append([SOS_ID] + ids + [EOS_ID])
    width = max(len(r) for r in rows)
    targets = torch.full((len(rows), width), PAD_ID, dtype=torch.long)
    for i, row in enumerate(rows):
        targets[i, :len(row)] = torch.tensor(row, dtype=torch.long)

    if modality == "speech":
        t_max = int(lengths.max())
        dim = utterances[0].features.shape[1]
        feats = torch.zeros(len(utterances), t_max, dim)
        for i, utt in enumerate(utterances):
            mat = utt.features
            if stats is not None and not utt.pre_normalized:
                mat = apply_cmvn(mat, stats)
            feats[i, :utt.num_frames] = torch.from_numpy(
                np.ascontiguousarray(mat, dtype=np.float32))
        return ModelBatch(modality="speech", input_lengths=lengths,
                          targets=targets, features=feats)

    t_max = int(lengths.max())
    ids = torch.full((len(utterances), t_max), phoneme_pad_id, dtype=torch.long)
    for i, utt in enumerate(utterances):
        ids[i, :utt.num_frames] = torch.tensor(utt.phoneme_ids, dtype=torch.long)
    return ModelBatch(modality="phoneme", input_lengths=lengths,
                      targets=targets, phoneme_ids=ids)


def _module_name(param_name: str) -> str:
    return param_name.split(".", 1)[0]


def _param_groups(model: SpeechSumModel, stage: StageConfig) -> list[dict]:
    grouped: dict[str, list] = {name: [] for name in model.MODULE_GROUPS}
    for name, param in model.named_parameters():
        grouped[_module_name(name)].append(param)
    groups = []
    for name in model.MODULE_GROUPS:
        peak = stage.per_module_lr.get(name, stage.base_lr)
        groups.append({"params": grouped[name], "lr": peak,
                       "name": name, "peak_lr": peak})
    return groups


def _apply_lr(optimizer: torch.optim.Optimizer, stage: StageConfig,
              step: int, val_history: list[float]) -> float:
    """Set each group's lr for the coming step; returns base-group lr."""
    base = None
    for group in optimizer.param_groups:
        peak = group["peak_lr"]
        if peak == 0.0:
            lr = 0.0
        elif stage.scheduler == "noam_warmup":
            lr = noam_lr(step, peak, stage.warmup_steps)
        else:
            lr = plateau_lr(val_history, peak, stage.plateau_factor,
                            stage.plateau_patience)
        group["lr"] = lr
        if base is None:
            base = lr
    return base if base is not None else 0.0


def _epoch_seed(seed: int, epoch: int) -> int:
    return int(np.random.SeedSequence([seed, epoch]).generate_state(1)[0])


def _evaluate(model: SpeechSumModel, batches: list[ModelBatch]) -> float:
    was_training = model.training
    model.eval()
    correct = 0
    total = 0
    with torch.no_grad():
        for batch in batches:
            _, accuracy, n_tokens = model.forward_loss(batch)
            correct += round(accuracy * n_tokens)
            total += n_tokens
    model.train(was_training)
    if total == 0:
        raise DataError("validation set has zero target tokens")
    return correct / total


def _snapshot(model: SpeechSumModel, optimizer: torch.optim.Optimizer | None,
              epoch: int, accuracy: float, stage: str) -> Checkpoint:
    opt_state = copy.deepcopy(optimizer.state_dict()) if optimizer else None
    return Checkpoint(
        model_state={k: v.detach().clone() for k, v in model.state_dict().items()},
        optimizer_state=opt_state, epoch=epoch,
        validation_accuracy=accuracy, stage=stage)


def train_stage(model: SpeechSumModel, stage: StageConfig,
                train_set: list[Utterance], valid_set: list[Utterance],
                bpe: BpeModel, stats: CmvnStats | None,
                checkpoint_in: Checkpoint | None = None,
                grad_clip: float = 5.0) -> TrainResult:
    stage.validate()
    if checkpoint_in is not None:
        model.load_state_dict(checkpoint_in.model_state)

    train_items = [u for u in train_set if u.role in stage.dataset_roles]
    valid_items = [u for u in valid_set if u.role in stage.dataset_roles]
    if not train_items:
        raise DataError(f"no training utterances with roles "
                        f"{sorted(stage.dataset_roles)}")
    if not valid_items:
        raise DataError(f"no validation utterances with roles "
                        f"{sorted(stage.dataset_roles)}")

    max_len = model.config.max_target_len
    valid_batches = [
        assemble_batch(b, bpe, stage.target_field, stats, max_len)
        for b in make_batches(valid_items, "fixed_count", 32,
                              _epoch_seed(stage.seed, 0))]

    optimizer = torch.optim.Adam(_param_groups(model, stage), lr=stage.base_lr,
                                 betas=ADAM_BETAS, eps=ADAM_EPS,
                                 weight_decay=stage.weight_decay)
    torch.manual_seed(stage.seed)
    history: list[EpochRecord] = []
    checkpoints: list[Checkpoint] = []
    val_history: list[float] = []
    step = 0

    for epoch in range(1, stage.max_epochs + 1):
        model.train()
        batches = make_batches(train_items, stage.batch_rule,
                               stage.batch_size_or_cap,
                               _epoch_seed(stage.seed, epoch))
        loss_sum = 0.0
        token_sum = 0
        lr_now = stage.base_lr
        for members in batches:
            batch = assemble_batch(members, bpe, stage.target_field,
                                   stats, max_len)
            step += 1
            lr_now = _apply_lr(optimizer, stage, step, val_history)
            optimizer.zero_grad()
            loss, _, n_tokens = model.forward_loss(batch)
            loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), grad_clip)
            optimizer.step()
            loss_sum += float(loss.detach()) * n_tokens
            token_sum += n_tokens
        accuracy = _evaluate(model, valid_batches)
        val_history.append(accuracy)
        history.append(EpochRecord(epoch=epoch, loss=loss_sum / token_sum,
                                   val_accuracy=accuracy, lr=lr_now))
        checkpoints.append(_snapshot(model, optimizer, epoch, accuracy,
                                     stage.stage))

    if checkpoints:
        final = checkpoints[-1]
    else:
        final = _snapshot(model, None, 0, 0.0, stage.stage)
    return TrainResult(history=history, checkpoints=checkpoints, final=final)


def select_checkpoint(checkpoints: list[Checkpoint]) -> Checkpoint:
    if not checkpoints:
        raise DataError("no checkpoints to select from")
    best = checkpoints[0]
    for ckpt in checkpoints[1:]:
        if ckpt.validation_accuracy > best.validation_accuracy:
            best = ckpt
    return best


def write_metrics_log(path: str | Path, history: list[EpochRecord]) -> None:
    lines = ["epoch\tloss\tval_accuracy\tlr"]
    for rec in history:
        lines.append(f"{rec.epoch}\t{repr(rec.loss)}\t"
                     f"{repr(rec.val_accuracy)}\t{repr(rec.lr)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
