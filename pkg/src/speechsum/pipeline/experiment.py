"""End-to-end toy experiment: corpus generation, BPE, the three
training stages, decoding, scoring, and the leakage filter/sweep.

All artifacts land under one working directory:

    corpus/            manifests, features, lexicon, durations, meta
    bpe.model          subword model
    cmvn.json          frame normalization stats
    stage_<name>/      metrics.tsv + checkpoint.ssn per trained stage
    decode_<name>.tsv  beam-search output per decoded stage
    report_<name>.json corpus-level scores per decoded stage
    leakage/           report.json, eval_filtered.tsv, sweep.tsv
    summary.json       headline numbers of the whole run
"""

from __future__ import annotations

import json
from pathlib import Path

import torch

from ..augment.repeat import build_augmented_set
from ..corpus.bpe import BpeModel, bpe_decode, train_bpe
from ..corpus.cmvn import CmvnStats, apply_cmvn, compute_cmvn_stats
from ..corpus.manifest import Utterance, with_role
from ..corpus.toygen import ToyCorpus, generate_toy_corpus
from ..decode.beam import beam_search
from ..decode.io import DecodeRecord, read_decode_output, write_decode_output
from ..errors import ConfigurationError
from ..eval.metrics import ScoreReport, score_corpus
from ..leakage.scoring import (filter_eval_set, pool_from_utterances,
                               threshold_sweep, write_filtered_manifest,
                               write_sweep_table)
from ..model.network import SpeechSumModel, init_parameters
from ..model.serialize import save_model
from ..training.stage import (Checkpoint, select_checkpoint, train_stage,
                              write_metrics_log)
from .config import ExperimentConfig


def train_bpe_for(config: ExperimentConfig, corpus: ToyCorpus) -> BpeModel:
    """Subword model over stage (i)+(ii) texts plus external summaries."""
    texts = [u.transcript for u in corpus.train]
    texts += [u.summary for u in corpus.train]
    texts += [pair.summary for pair in corpus.external_pairs]
    return train_bpe(texts, config.model.vocab_size)


def decode_eval_set(model: SpeechSumModel, utterances: list[Utterance],
                    bpe: BpeModel, stats: CmvnStats | None, beam_width: int,
                    max_len: int,
                    length_normalize: bool = False) -> list[DecodeRecord]:
    records = []
    for utt in sorted(utterances, key=lambda u: u.id):
        feats = utt.load_features()
        if stats is not None and not utt.pre_normalized:
            feats = apply_cmvn(feats, stats)
        batch = torch.from_numpy(feats).unsqueeze(0).float()
        lengths = torch.tensor([utt.num_frames])
        with torch.no_grad():
            memory, mask = model.encode_speech(batch, lengths)
        result = beam_search(model, memory[0], mask[0], beam_width, max_len,
                             length_normalize)
        records.append(DecodeRecord(
            utt_id=utt.id, text=bpe_decode(bpe, result.best.tokens),
            log_prob=result.best.log_prob, finished=result.best.finished))
    return records


def score_records(records: list[DecodeRecord], utterances: list[Utterance],
                  target_field: str) -> ScoreReport:
    refs = {u.id: (u.transcript if target_field == "transcript" else u.summary)
            for u in utterances}
    pairs = [(refs[rec.utt_id], rec.text) for rec in records]
    return score_corpus(pairs)


def _stage_datasets(stage_name: str, corpus: ToyCorpus,
                    ext_utts: list[Utterance]):
    if stage_name == "asr":
        return with_role(corpus.train, "asr"), with_role(corpus.valid, "asr")
    if stage_name == "ssum":
        return list(corpus.train), list(corpus.valid)
    if stage_name == "augmented":
        # hold out a slice of the artificial set so checkpoint selection
        # tracks the fit of both origins, not the real subset alone
        n_held = min(60, len(ext_utts) // 20)
        cut = len(ext_utts) - n_held
        return (list(corpus.train) + ext_utts[:cut],
                list(corpus.valid) + ext_utts[cut:])
    raise ConfigurationError(f"unknown stage {stage_name!r}")


def run_experiment(config: ExperimentConfig, workdir: str | Path) -> dict:
    config.validate()
    torch.set_num_threads(1)
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)

    corpus = generate_toy_corpus(config.corpus, workdir / "corpus")
    bpe = train_bpe_for(config, corpus)
    bpe.save(workdir / "bpe.model")
    stats = compute_cmvn_stats(corpus.train)
    stats.save(workdir / "cmvn.json")

    augmented = build_augmented_set(
        corpus.external_pairs, corpus.lexicon, corpus.durations,
        seed=config.seed, inventory=corpus.inventory,
        boundary_run=config.augment.boundary_run,
        frame_cap=config.corpus.frame_cap)

    model = init_parameters(config.model, config.seed)
    checkpoint: Checkpoint | None = None
    summary: dict = {"stages": {}}

    for stage in config.stages:
        train_set, valid_set = _stage_datasets(stage.stage, corpus,
                                               augmented.utterances)
        result = train_stage(model, stage, train_set, valid_set, bpe, stats,
                             checkpoint_in=checkpoint)
        best = (select_checkpoint(result.checkpoints)
                if result.checkpoints else result.final)
        checkpoint = best
        model.load_state_dict(best.model_state)

        stage_dir = workdir / f"stage_{stage.stage}"
        stage_dir.mkdir(exist_ok=True)
        write_metrics_log(stage_dir / "metrics.tsv", result.history)
        save_model(stage_dir / "checkpoint.ssn", model, stage=stage.stage,
                   extra_meta={"epoch": best.epoch,
                               "validation_accuracy": best.validation_accuracy})

        if stage.stage == "asr":
            beam, target = config.decode.asr_beam_width, "transcript"
        else:
            beam, target = config.decode.summary_beam_width, "summary"
        records = decode_eval_set(model, corpus.eval, bpe, stats, beam,
                                  config.decode.max_len,
                                  config.decode.length_normalize)
        write_decode_output(workdir / f"decode_{stage.stage}.tsv", records)
        report = score_records(records, corpus.eval, target)
        report.save(workdir / f"report_{stage.stage}.json")
        summary["stages"][stage.stage] = {
            "best_epoch": best.epoch,
            "validation_accuracy": best.validation_accuracy,
            "wer": report.wer,
            "rougeL_f1": report.rougeL.f1,
        }

    leak_dir = workdir / "leakage"
    leak_dir.mkdir(exist_ok=True)
    pool = pool_from_utterances(corpus.train + corpus.valid)
    leak_report = filter_eval_set(corpus.eval, pool, config.leakage.alpha)
    leak_report.save(leak_dir / "report.json")
    write_filtered_manifest(leak_dir / "eval_filtered.tsv", corpus.eval,
                            leak_report)
    summary["leakage"] = {"alpha": config.leakage.alpha,
                          "n_kept": len(leak_report.kept_ids),
                          "n_removed": len(leak_report.removed_ids)}

    systems = {}
    for name in ("ssum", "augmented"):
        path = workdir / f"decode_{name}.tsv"
        if path.exists():
            systems[name] = {rec.utt_id: rec.text
                             for rec in read_decode_output(path)}
    if systems:
        rows = threshold_sweep(corpus.eval, pool, systems,
                               list(config.leakage.sweep_alphas),
                               config.leakage.metric)
        write_sweep_table(leak_dir / "sweep.tsv", rows, config.leakage.metric)

    with open(workdir / "summary.json", "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return summary
