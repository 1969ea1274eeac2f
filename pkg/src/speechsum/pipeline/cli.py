"""Command-line surface; every subcommand is a thin wrapper over one
module operation chain. Exit codes: 0 success, 2 configuration error,
3 data/format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import torch

from ..augment.duration import DurationTable
from ..augment.g2p import load_lexicon
from ..augment.ingest import ingest_external_features
from ..augment.repeat import build_augmented_set
from ..corpus.bpe import BpeModel
from ..corpus.cmvn import CmvnStats, compute_cmvn_stats
from ..corpus.manifest import read_external_pairs, write_manifest
from ..corpus.toygen import generate_toy_corpus
from ..decode.io import read_decode_output, write_decode_output
from ..errors import (ConfigurationError, DataError, NumericalError,
                      SpeechSumError)
from ..leakage.scoring import (filter_eval_set, pool_from_utterances,
                               threshold_sweep, write_filtered_manifest,
                               write_sweep_table)
from ..model.gradcheck import run_gradcheck
from ..model.network import init_parameters
from ..model.serialize import load_model, save_model
from ..training.stage import select_checkpoint, train_stage, write_metrics_log
from .config import ExperimentConfig, experiment_preset, load_config
from .experiment import (_stage_datasets, decode_eval_set, run_experiment,
                         score_records, train_bpe_for)


def _load(args) -> ExperimentConfig:
    if args.config:
        return load_config(args.config, seed_override=args.seed)
    return experiment_preset("toy", seed=args.seed)


def _out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _read_corpus(config: ExperimentConfig, out: Path):
    """Regenerate the toy corpus deterministically under the workdir."""
    corpus_dir = out / "corpus"
    return generate_toy_corpus(config.corpus, corpus_dir)


def cmd_toygen(args) -> None:
    config = _load(args)
    corpus = generate_toy_corpus(config.corpus, _out(args) / "corpus")
    print(f"toy corpus: {len(corpus.train)} train, {len(corpus.valid)} valid, "
          f"{len(corpus.eval)} eval, {len(corpus.external_pairs)} external pairs")


def cmd_bpe_train(args) -> None:
    config = _load(args)
    out = _out(args)
    corpus = _read_corpus(config, out)
    bpe = train_bpe_for(config, corpus)
    bpe.save(out / "bpe.model")
    stats = compute_cmvn_stats(corpus.train)
    stats.save(out / "cmvn.json")
    print(f"bpe model: {bpe.vocab_size} tokens -> {out / 'bpe.model'}")


def cmd_train(args) -> None:
    config = _load(args)
    out = _out(args)
    stage = next((s for s in config.stages if s.stage == args.stage), None)
    if stage is None:
        raise ConfigurationError(f"config does not define stage {args.stage!r}")
    corpus = _read_corpus(config, out)
    bpe = BpeModel.load(out / "bpe.model")
    stats = CmvnStats.load(out / "cmvn.json")
    augmented = build_augmented_set(
        corpus.external_pairs, corpus.lexicon, corpus.durations,
        seed=config.seed, inventory=corpus.inventory,
        boundary_run=config.augment.boundary_run,
        frame_cap=config.corpus.frame_cap)

    prior = {"asr": None, "ssum": "asr", "augmented": "ssum"}[args.stage]
    if prior is None:
        model = init_parameters(config.model, config.seed)
    else:
        model, _ = load_model(out / f"stage_{prior}" / "checkpoint.ssn")

    train_set, valid_set = _stage_datasets(args.stage, corpus,
                                           augmented.utterances)
    result = train_stage(model, stage, train_set, valid_set, bpe, stats)
    best = (select_checkpoint(result.checkpoints)
            if result.checkpoints else result.final)
    model.load_state_dict(best.model_state)
    stage_dir = out / f"stage_{args.stage}"
    stage_dir.mkdir(exist_ok=True)
    write_metrics_log(stage_dir / "metrics.tsv", result.history)
    save_model(stage_dir / "checkpoint.ssn", model, stage=args.stage,
               extra_meta={"epoch": best.epoch,
                           "validation_accuracy": best.validation_accuracy})
    print(f"stage {args.stage}: best epoch {best.epoch}, "
          f"val accuracy {best.validation_accuracy:.4f}")


def cmd_augment_build(args) -> None:
    config = _load(args)
    out = _out(args)
    corpus_dir = out / "corpus"
    pairs = read_external_pairs(corpus_dir / "external_pairs.tsv")
    lexicon = load_lexicon(corpus_dir / "lexicon.txt")
    table = DurationTable.load(corpus_dir / "durations.tsv")
    augmented = build_augmented_set(
        pairs, lexicon, table, seed=config.seed,
        boundary_run=config.augment.boundary_run,
        frame_cap=config.corpus.frame_cap)
    write_manifest(out / "augmented.tsv", augmented.utterances)
    print(f"augmented set: {len(augmented.utterances)} utterances, "
          f"{augmented.n_skipped} skipped")


def cmd_ingest_tts(args) -> None:
    out = _out(args)
    stats = CmvnStats.load(out / "cmvn.json")
    pairs = read_external_pairs(args.pairs)
    feature_paths = [Path(p) for p in args.features]
    utterances = ingest_external_features(
        feature_paths, stats, [pair.summary for pair in pairs])
    write_manifest(out / "ingested.tsv", utterances)
    print(f"ingested {len(utterances)} external feature files")


def cmd_decode(args) -> None:
    config = _load(args)
    out = _out(args)
    corpus = _read_corpus(config, out)
    bpe = BpeModel.load(out / "bpe.model")
    stats = CmvnStats.load(out / "cmvn.json")
    model, _ = load_model(out / f"stage_{args.stage}" / "checkpoint.ssn")
    if args.stage == "asr":
        beam = config.decode.asr_beam_width
    else:
        beam = config.decode.summary_beam_width
    records = decode_eval_set(model, corpus.eval, bpe, stats, beam,
                              config.decode.max_len,
                              config.decode.length_normalize)
    write_decode_output(out / f"decode_{args.stage}.tsv", records)
    print(f"decoded {len(records)} utterances -> decode_{args.stage}.tsv")


def cmd_score(args) -> None:
    config = _load(args)
    out = _out(args)
    corpus = _read_corpus(config, out)
    records = read_decode_output(out / f"decode_{args.stage}.tsv")
    target = "transcript" if args.stage == "asr" else "summary"
    report = score_records(records, corpus.eval, target)
    report.save(out / f"report_{args.stage}.json")
    print(report.format_table())


def cmd_leakage(args) -> None:
    config = _load(args)
    out = _out(args)
    corpus = _read_corpus(config, out)
    leak_dir = out / "leakage"
    leak_dir.mkdir(exist_ok=True)
    pool = pool_from_utterances(corpus.train + corpus.valid)

    if args.action == "score":
        report = filter_eval_set(corpus.eval, pool, config.leakage.alpha)
        report.save(leak_dir / "report.json")
        for row in report.per_sample:
            print(f"{row['id']}\t{row['leakage_score']:.4f}"
                  f"\t{row['nearest_train_id']}")
    elif args.action == "filter":
        report = filter_eval_set(corpus.eval, pool, config.leakage.alpha)
        report.save(leak_dir / "report.json")
        write_filtered_manifest(leak_dir / "eval_filtered.tsv", corpus.eval,
                                report)
        print(f"kept {len(report.kept_ids)}, removed {len(report.removed_ids)} "
              f"at alpha={config.leakage.alpha}")
    else:
        systems = {}
        for name in ("ssum", "augmented"):
            path = out / f"decode_{name}.tsv"
            if path.exists():
                systems[name] = {r.utt_id: r.text
                                 for r in read_decode_output(path)}
        if not systems:
            raise DataError("no decode outputs found to sweep over")
        rows = threshold_sweep(corpus.eval, pool, systems,
                               list(config.leakage.sweep_alphas),
                               config.leakage.metric)
        write_sweep_table(leak_dir / "sweep.tsv", rows, config.leakage.metric)
        print(f"sweep over {len(config.leakage.sweep_alphas)} alphas "
              f"x {len(systems)} systems -> sweep.tsv")


def cmd_gradcheck(args) -> None:
    report = run_gradcheck()
    for case in report.cases:
        state = "ok" if case.max_rel_err < report.tolerance else "FAIL"
        print(f"seed={case.seed} {case.modality:8s} {case.positional_mode:20s} "
              f"max_rel={case.max_rel_err:.3e} [{state}]")
    print(f"overall max relative error {report.max_rel_err:.3e} "
          f"(tolerance {report.tolerance:.0e}, {report.n_checked} elements)")
    if not report.passed:
        raise NumericalError("gradient check failed")


def cmd_run(args) -> None:
    config = _load(args)
    summary = run_experiment(config, _out(args))
    for stage, row in sorted(summary.get("stages", {}).items()):
        print(f"{stage}: wer={row['wer']:.4f} rougeL={row['rougeL_f1']:.4f}")
    leak = summary.get("leakage", {})
    if leak:
        print(f"leakage: kept {leak['n_kept']}, removed {leak['n_removed']}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speechsum",
        description="End-to-end speech summarization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", default=None, help="experiment config YAML")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--out", default="work", help="working directory")

    common(sub.add_parser("toygen", help="generate the synthetic corpus"))
    common(sub.add_parser("bpe-train", help="train the subword model"))
    p = sub.add_parser("train", help="run one training stage")
    common(p)
    p.add_argument("--stage", required=True, choices=("asr", "ssum", "augmented"))
    common(sub.add_parser("augment-build", help="build the phoneme set"))
    p = sub.add_parser("ingest-tts", help="ingest synthesized features")
    common(p)
    p.add_argument("--features", nargs="+", required=True)
    p.add_argument("--pairs", required=True)
    p = sub.add_parser("decode", help="beam-search decode the eval set")
    common(p)
    p.add_argument("--stage", required=True, choices=("asr", "ssum", "augmented"))
    p = sub.add_parser("score", help="score decode output against references")
    common(p)
    p.add_argument("--stage", required=True, choices=("asr", "ssum", "augmented"))
    p = sub.add_parser("leakage", help="leakage scoring/filtering/sweeping")
    common(p)
    p.add_argument("action", choices=("score", "filter", "sweep"))
    common(sub.add_parser("gradcheck", help="finite-difference gradient suite"))
    common(sub.add_parser("run", help="full toy experiment, all stages"))
    return parser


COMMANDS = {
    "toygen": cmd_toygen,
    "bpe-train": cmd_bpe_train,
    "train": cmd_train,
    "augment-build": cmd_augment_build,
    "ingest-tts": cmd_ingest_tts,
    "decode": cmd_decode,
    "score": cmd_score,
    "leakage": cmd_leakage,
    "gradcheck": cmd_gradcheck,
    "run": cmd_run,
}


def main(argv: list[str] | None = None) -> int:
    torch.set_num_threads(1)
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except SpeechSumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
