"""Experiment configuration: YAML files with strict key checking and
the shipped toy/base/large presets.

A config file may name a preset and override any subset of its keys;
unknown keys are rejected at every level, naming the offending key.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

from ..corpus.toygen import ToyCorpusSpec
from ..errors import ConfigurationError
from ..model.config import MODEL_PRESETS, ModelConfig
from ..training.stage import StageConfig

STAGE_ORDER = ("asr", "ssum", "augmented")


def _check_keys(raw: dict, allowed: set[str], where: str) -> None:
    for key in raw:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {key!r} in {where}")


def _dataclass_from_dict(cls, raw: dict, where: str):
    _check_keys(raw, {f.name for f in fields(cls)}, where)
    return cls(**raw)


@dataclass
class DecodeProfile:
    asr_beam_width: int = 16
    summary_beam_width: int = 4
    max_len: int = 48
    length_normalize: bool = False

    def validate(self) -> None:
        if self.asr_beam_width < 1 or self.summary_beam_width < 1:
            raise ConfigurationError("beam widths must be >= 1")
        if self.max_len < 1:
            raise ConfigurationError("decode max_len must be >= 1")


@dataclass
class AugmentProfile:
    boundary_run: int = 1

    def validate(self) -> None:
        if self.boundary_run < 1:
            raise ConfigurationError("boundary_run must be >= 1")


@dataclass
class LeakageProfile:
    alpha: float = 0.9
    metric: str = "rougeL_f1"
    sweep_alphas: tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("leakage alpha must lie in [0, 1]")
        if list(self.sweep_alphas) != sorted(self.sweep_alphas):
            raise ConfigurationError("sweep_alphas must be ascending")


@dataclass
class ExperimentConfig:
    seed: int
    model: ModelConfig
    corpus: ToyCorpusSpec
    stages: list[StageConfig]
    augment: AugmentProfile = field(default_factory=AugmentProfile)
    decode: DecodeProfile = field(default_factory=DecodeProfile)
    leakage: LeakageProfile = field(default_factory=LeakageProfile)

    def validate(self) -> None:
        self.model.validate()
        self.corpus.validate()
        names = [s.stage for s in self.stages]
        if tuple(names) != STAGE_ORDER[:len(names)]:
            raise ConfigurationError(
                f"stages must form a prefix of {list(STAGE_ORDER)} "
                f"(asr before ssum before augmented), got {names}")
        for stage in self.stages:
            stage.validate()
        self.augment.validate()
        self.decode.validate()
        self.leakage.validate()

    def to_dict(self) -> dict:
        out = {
            "seed": self.seed,
            "model": self.model.to_dict(),
            "corpus": asdict(self.corpus),
            "stages": [],
            "augment": asdict(self.augment),
            "decode": asdict(self.decode),
            "leakage": {**asdict(self.leakage),
                        "sweep_alphas": list(self.leakage.sweep_alphas)},
        }
        out["corpus"]["oov_words"] = list(self.corpus.oov_words)
        for stage in self.stages:
            raw = asdict(stage)
            raw["dataset_roles"] = sorted(stage.dataset_roles)
            out["stages"].append(raw)
        return out


def _stage_from_dict(raw: dict, index: int, default_seed: int) -> StageConfig:
    raw = dict(raw)
    _check_keys(raw, {f.name for f in fields(StageConfig)}, f"stages[{index}]")
    if "dataset_roles" in raw:
        raw["dataset_roles"] = frozenset(raw["dataset_roles"])
    raw.setdefault("seed", default_seed + index)
    return StageConfig(**raw)


def config_from_dict(raw: dict) -> ExperimentConfig:
    raw = dict(raw)
    _check_keys(raw, {"preset", "seed", "model", "corpus", "stages",
                      "augment", "decode", "leakage"}, "experiment config")
    preset = raw.pop("preset", None)
    if preset is not None:
        base = _preset_dict(preset)
        raw = _merge(base, raw)

    if "seed" not in raw:
        raise ConfigurationError("experiment config requires a seed")
    seed = int(raw["seed"])

    model = ModelConfig.from_dict(raw.get("model", {}))

    corpus_raw = dict(raw.get("corpus", {}))
    _check_keys(corpus_raw, {f.name for f in fields(ToyCorpusSpec)}, "corpus")
    if "oov_words" in corpus_raw:
        corpus_raw["oov_words"] = tuple(corpus_raw["oov_words"])
    corpus_raw.setdefault("seed", seed)
    corpus = ToyCorpusSpec(**corpus_raw)

    stages = [_stage_from_dict(s, i, seed)
              for i, s in enumerate(raw.get("stages", []))]

    augment = _dataclass_from_dict(AugmentProfile, raw.get("augment", {}),
                                   "augment")
    decode = _dataclass_from_dict(DecodeProfile, raw.get("decode", {}), "decode")
    leak_raw = dict(raw.get("leakage", {}))
    if "sweep_alphas" in leak_raw:
        leak_raw["sweep_alphas"] = tuple(leak_raw["sweep_alphas"])
    leakage = _dataclass_from_dict(LeakageProfile, leak_raw, "leakage")

    config = ExperimentConfig(seed=seed, model=model, corpus=corpus,
                              stages=stages, augment=augment, decode=decode,
                              leakage=leakage)
    config.validate()
    return config


def load_config(path: str | Path, seed_override: int | None = None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config must be a mapping")
    if seed_override is not None:
        raw["seed"] = seed_override
    return config_from_dict(raw)


def save_config(path: str | Path, config: ExperimentConfig) -> None:
    with open(path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config.to_dict(), f, sort_keys=True)


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if key == "preset":
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def _preset_dict(name: str) -> dict:
    if name not in EXPERIMENT_PRESETS:
        raise ConfigurationError(
            f"unknown preset {name!r}; choose from {sorted(EXPERIMENT_PRESETS)}")
    return EXPERIMENT_PRESETS[name]


def experiment_preset(name: str, seed: int | None = None) -> ExperimentConfig:
    raw = dict(_preset_dict(name))
    if seed is not None:
        raw = _merge(raw, {"seed": seed})
    return config_from_dict(raw)


def _toy_preset() -> dict:
    return {
        "seed": 1234,
        "model": dict(MODEL_PRESETS["toy"]),
        "corpus": {"external_parallel_fraction": 0.55},
        "stages": [
            dict(stage="asr", dataset_roles=["asr"], target_field="transcript",
                 base_lr=2e-3, scheduler="noam_warmup", warmup_steps=150,
                 batch_rule="fixed_count", batch_size_or_cap=32,
                 weight_decay=1e-5, max_epochs=12),
            dict(stage="ssum", dataset_roles=["sum"], target_field="summary",
                 base_lr=3e-4, scheduler="plateau", plateau_factor=0.5,
                 batch_rule="fixed_count", batch_size_or_cap=32,
                 max_epochs=8),
            dict(stage="augmented", dataset_roles=["sum", "ext"],
                 target_field="summary", base_lr=3e-4,
                 per_module_lr={"decoder": 3e-3, "phoneme_preencoder": 3e-3},
                 scheduler="plateau", plateau_factor=0.5, plateau_patience=4,
                 batch_rule="max_total_length", batch_size_or_cap=6000,
                 max_epochs=20),
        ],
        "augment": {},
        "decode": {"max_len": 88},
        "leakage": {},
    }


def _full_scale_preset(model_name: str) -> dict:
    # reference profile for the published operating point; not desk-runnable
    return {
        "seed": 1234,
        "model": dict(MODEL_PRESETS[model_name]),
        "corpus": {},
        "stages": [
            dict(stage="asr", dataset_roles=["asr"], target_field="transcript",
                 base_lr=2e-3, scheduler="noam_warmup", warmup_steps=40000,
                 batch_rule="fixed_count", batch_size_or_cap=512,
                 weight_decay=1e-5, max_epochs=100),
            dict(stage="ssum", dataset_roles=["sum"], target_field="summary",
                 base_lr=1e-4, scheduler="plateau", plateau_factor=0.5,
                 batch_rule="fixed_count", batch_size_or_cap=30,
                 max_epochs=100),
            dict(stage="augmented", dataset_roles=["sum", "ext"],
                 target_field="summary", base_lr=1e-4,
                 per_module_lr={"decoder": 1e-3, "phoneme_preencoder": 1e-3},
                 scheduler="plateau", plateau_factor=0.5,
                 batch_rule="max_total_length", batch_size_or_cap=300000,
                 max_epochs=100),
        ],
        "augment": {},
        "decode": {},
        "leakage": {},
    }


EXPERIMENT_PRESETS: dict[str, dict] = {
    "toy": _toy_preset(),
    "base": _full_scale_preset("base"),
    "large": _full_scale_preset("large"),
}
