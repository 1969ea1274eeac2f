"""Evaluation-set contamination analysis.

A sample's leakage score is the maximum ROUGE-L F1 of its reference
summary against a pool (by default the train + validation summaries,
never the evaluation set itself). Filtering removes samples scoring
strictly above a threshold alpha; sweeps tabulate metric-vs-alpha
curves per decoded system.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from ..corpus.manifest import Utterance, write_manifest
from ..errors import ConfigurationError, DataError
from ..eval.metrics import PRF, ScoreReport, lcs_length, score_corpus, tokenize


def _f1_from_lcs(lcs: int, ref_len: int, hyp_len: int) -> float:
    return PRF.from_counts(lcs, hyp_len, ref_len).f1


def leakage_score(summary: str, reference_pool: dict[str, str]) -> tuple[float, str]:
    """Max ROUGE-L F1 of ``summary`` over the pool; ties take the
    lexicographically smallest pool id.

    A cheap bound (token-bag intersection caps the LCS) skips most DP
    evaluations without changing the result.
    """
    if not reference_pool:
        raise DataError("leakage_score needs a non-empty reference pool")
    query = tokenize(summary)
    query_bag = Counter(query)
    best_score = -1.0
    best_id = ""
    for pool_id in sorted(reference_pool):
        cand = tokenize(reference_pool[pool_id])
        if not query or not cand:
            score = 0.0
        else:
            bound = sum(min(c, query_bag[t]) for t, c in Counter(cand).items())
            if _f1_from_lcs(bound, len(cand), len(query)) <= best_score:
                continue
            score = _f1_from_lcs(lcs_length(cand, query), len(cand), len(query))
        if score > best_score:
            best_score = score
            best_id = pool_id
    return best_score, best_id


@dataclass
class LeakageReport:
    alpha: float
    per_sample: list[dict] = field(default_factory=list)
    kept_ids: list[str] = field(default_factory=list)
    removed_ids: list[str] = field(default_factory=list)

    def score_of(self, sample_id: str) -> float:
        for row in self.per_sample:
            if row["id"] == sample_id:
                return row["leakage_score"]
        raise DataError(f"no leakage entry for id {sample_id!r}")

    def to_json(self) -> str:
        return json.dumps({"alpha": self.alpha, "per_sample": self.per_sample,
                           "kept_ids": self.kept_ids, "removed_ids": self.removed_ids},
                          indent=2, sort_keys=True)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")


def pool_from_utterances(utterances: list[Utterance]) -> dict[str, str]:
    return {utt.id: utt.summary for utt in utterances}


def filter_eval_set(eval_set: list[Utterance], reference_pool: dict[str, str],
                    alpha: float) -> LeakageReport:
    """Score every eval sample and remove those strictly above alpha."""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}")
    report = LeakageReport(alpha=alpha)
    for utt in sorted(eval_set, key=lambda u: u.id):
        score, nearest = leakage_score(utt.summary, reference_pool)
        report.per_sample.append(
            {"id": utt.id, "leakage_score": score, "nearest_train_id": nearest})
        if score > alpha:
            report.removed_ids.append(utt.id)
        else:
            report.kept_ids.append(utt.id)
    return report


def write_filtered_manifest(path: str | Path, eval_set: list[Utterance],
                            report: LeakageReport) -> None:
    kept = set(report.kept_ids)
    write_manifest(path, [utt for utt in eval_set if utt.id in kept])


_METRIC_FIELDS = ("rouge1_f1", "rouge2_f1", "rougeL_f1", "meteor", "wer")


def _metric_value(report: ScoreReport, metric: str) -> float:
    if metric == "rouge1_f1":
        return report.rouge1.f1
    if metric == "rouge2_f1":
        return report.rouge2.f1
    if metric == "rougeL_f1":
        return report.rougeL.f1
    if metric == "meteor":
        return report.meteor
    if metric == "wer":
        return report.wer
    raise ConfigurationError(f"unknown metric {metric!r}; choose from {_METRIC_FIELDS}")


@dataclass
class SweepRow:
    alpha: float
    system: str
    metric_value: float
    n_kept: int


def threshold_sweep(eval_set: list[Utterance], reference_pool: dict[str, str],
                    decoded_outputs: dict[str, dict[str, str]],
                    alpha_list: list[float], metric: str = "rougeL_f1") -> list[SweepRow]:
    """Metric of each system on the kept subset, for each alpha.

    Per-sample leakage scores are computed once and reused across the
    whole grid. Systems map system name -> {eval id -> decoded text}.
    """
    if sorted(alpha_list) != list(alpha_list):
        raise ConfigurationError("alpha_list must be sorted ascending")
    scores: dict[str, float] = {}
    for utt in eval_set:
        scores[utt.id], _ = leakage_score(utt.summary, reference_pool)
    by_id = {utt.id: utt for utt in eval_set}
    rows: list[SweepRow] = []
    for alpha in alpha_list:
        if not 0.0 <= alpha <= 1.0:
            raise ConfigurationError(f"alpha must lie in [0, 1], got {alpha}")
        kept = sorted(uid for uid, s in scores.items() if s <= alpha)
        for system in sorted(decoded_outputs):
            hyps = decoded_outputs[system]
            pairs = []
            for uid in kept:
                if uid not in hyps:
                    raise DataError(f"system {system!r} has no decode for kept id {uid!r}")
                pairs.append((by_id[uid].summary, hyps[uid]))
            value = _metric_value(score_corpus(pairs), metric) if pairs else 0.0
            rows.append(SweepRow(alpha=alpha, system=system,
                                 metric_value=value, n_kept=len(kept)))
    return rows


def write_sweep_table(path: str | Path, rows: list[SweepRow], metric: str) -> None:
    lines = [f"alpha\tsystem\t{metric}\tn_kept"]
    for row in rows:
        lines.append(f"{row.alpha:.2f}\t{row.system}\t{row.metric_value:.6f}\t{row.n_kept}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
