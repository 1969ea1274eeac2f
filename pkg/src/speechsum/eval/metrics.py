"""Summarization and ASR metrics implemented from first principles.

All metrics share one tokenization: lowercase, whitespace split, with
terminal punctuation peeled off into separate tokens. ROUGE-1/2/L,
a light METEOR (exact + Porter-stem alignment stages, no synonym
database), and word error rate.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from ..errors import DataError
from .stemmer import porter_stem

_TERMINAL_PUNCT = ".,!?;:"


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, split trailing punctuation off."""
    tokens: list[str] = []
    for raw in text.lower().split():
        tail: list[str] = []
        while len(raw) > 1 and raw[-1] in _TERMINAL_PUNCT:
            tail.append(raw[-1])
            raw = raw[:-1]
        tokens.append(raw)
        tokens.extend(reversed(tail))
    return tokens


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    @staticmethod
    def from_counts(match: float, hyp_total: int, ref_total: int) -> "PRF":
        p = match / hyp_total if hyp_total > 0 else 0.0
        r = match / ref_total if ref_total > 0 else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return PRF(precision=p, recall=r, f1=f1)


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(ref: str, hyp: str, n: int) -> PRF:
    """Clipped n-gram overlap precision/recall/F1."""
    if n < 1:
        raise DataError(f"rouge_n needs n >= 1, got {n}")
    ref_grams = _ngrams(tokenize(ref), n)
    hyp_grams = _ngrams(tokenize(hyp), n)
    match = sum(min(count, ref_grams[gram]) for gram, count in hyp_grams.items())
    return PRF.from_counts(match, sum(hyp_grams.values()), sum(ref_grams.values()))


def lcs_length(a: list[str], b: list[str]) -> int:
    """Longest-common-subsequence length via the standard DP recurrence."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        curr = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                curr[j] = max(prev[j], curr[j - 1])
        prev = curr
    return prev[len(b)]


def rouge_l(ref: str, hyp: str) -> PRF:
    ref_toks = tokenize(ref)
    hyp_toks = tokenize(hyp)
    lcs = lcs_length(ref_toks, hyp_toks)
    return PRF.from_counts(lcs, len(hyp_toks), len(ref_toks))


def _greedy_align(ref_toks: list[str], hyp_toks: list[str]) -> list[tuple[int, int]]:
    """Two-stage greedy alignment: exact matches, then Porter-stem matches.

    Returns (hyp_index, ref_index) pairs; each position used at most once.
    """
    matches: list[tuple[int, int]] = []
    ref_used = [False] * len(ref_toks)
    hyp_used = [False] * len(hyp_toks)
    for exact in (True, False):
        if not exact:
            ref_keys = [porter_stem(t) for t in ref_toks]
            hyp_keys = [porter_stem(t) for t in hyp_toks]
        else:
            ref_keys, hyp_keys = ref_toks, hyp_toks
        for hi, key in enumerate(hyp_keys):
            if hyp_used[hi]:
                continue
            for ri, ref_key in enumerate(ref_keys):
                if not ref_used[ri] and ref_key == key:
                    matches.append((hi, ri))
                    ref_used[ri] = True
                    hyp_used[hi] = True
                    break
    matches.sort()
    return matches


def _count_chunks(matches: list[tuple[int, int]]) -> int:
    chunks = 0
    prev_hi, prev_ri = None, None
    for hi, ri in matches:
        if prev_hi is None or hi != prev_hi + 1 or ri != prev_ri + 1:
            chunks += 1
        prev_hi, prev_ri = hi, ri
    return chunks


def meteor_lite(ref: str, hyp: str) -> float:
    """Light METEOR: exact + stem alignment, fragmentation penalty.

    Fmean = P*R / (0.9*P + 0.1*R); penalty = 0.5 * (chunks/matches)^3;
    score = Fmean * (1 - penalty). Zero when nothing aligns.
    """
    ref_toks = tokenize(ref)
    hyp_toks = tokenize(hyp)
    matches = _greedy_align(ref_toks, hyp_toks)
    m = len(matches)
    if m == 0:
        return 0.0
    p = m / len(hyp_toks)
    r = m / len(ref_toks)
    fmean = p * r / (0.9 * p + 0.1 * r)
    chunks = _count_chunks(matches)
    penalty = 0.5 * (chunks / m) ** 3
    return fmean * (1.0 - penalty)


def edit_distance(ref_toks: list[str], hyp_toks: list[str]) -> int:
    """Minimal substitutions + deletions + insertions between token lists."""
    prev = list(range(len(hyp_toks) + 1))
    for i in range(1, len(ref_toks) + 1):
        curr = [i] + [0] * len(hyp_toks)
        for j in range(1, len(hyp_toks) + 1):
            sub = prev[j - 1] + (ref_toks[i - 1] != hyp_toks[j - 1])
            curr[j] = min(sub, prev[j] + 1, curr[j - 1] + 1)
        prev = curr
    return prev[len(hyp_toks)]


def wer(ref: str, hyp: str) -> float:
    """(S + D + I) / reference length; empty reference is an error."""
    ref_toks = tokenize(ref)
    if not ref_toks:
        raise DataError("wer needs a non-empty reference")
    return edit_distance(ref_toks, tokenize(hyp)) / len(ref_toks)


@dataclass
class ScoreReport:
    rouge1: PRF
    rouge2: PRF
    rougeL: PRF
    meteor: float
    wer: float
    n_items: int

    def to_json(self) -> str:
        payload = {
            "rouge1": vars(self.rouge1), "rouge2": vars(self.rouge2),
            "rougeL": vars(self.rougeL), "meteor": self.meteor,
            "wer": self.wer, "n_items": self.n_items,
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ScoreReport":
        raw = json.loads(text)
        return cls(rouge1=PRF(**raw["rouge1"]), rouge2=PRF(**raw["rouge2"]),
                   rougeL=PRF(**raw["rougeL"]), meteor=raw["meteor"],
                   wer=raw["wer"], n_items=raw["n_items"])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json() + "\n", encoding="utf-8")

    def format_table(self) -> str:
        rows = [
            ("metric", "precision", "recall", "f1"),
            ("rouge-1", f"{self.rouge1.precision:.4f}", f"{self.rouge1.recall:.4f}", f"{self.rouge1.f1:.4f}"),
            ("rouge-2", f"{self.rouge2.precision:.4f}", f"{self.rouge2.recall:.4f}", f"{self.rouge2.f1:.4f}"),
            ("rouge-l", f"{self.rougeL.precision:.4f}", f"{self.rougeL.recall:.4f}", f"{self.rougeL.f1:.4f}"),
            ("meteor", "", "", f"{self.meteor:.4f}"),
            ("wer", "", "", f"{self.wer:.4f}"),
        ]
        widths = [max(len(row[c]) for row in rows) for c in range(4)]
        lines = ["  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
                 for row in rows]
        lines.append(f"n_items: {self.n_items}")
        return "\n".join(lines)


def score_corpus(pairs: list[tuple[str, str]]) -> ScoreReport:
    """Corpus scores: unweighted mean of per-pair metrics.

    WER is aggregated as total edit errors over total reference words.
    """
    if not pairs:
        raise DataError("score_corpus needs at least one (ref, hyp) pair")
    n = len(pairs)
    acc = {"r1": [0.0, 0.0, 0.0], "r2": [0.0, 0.0, 0.0], "rl": [0.0, 0.0, 0.0]}
    meteor_sum = 0.0
    total_errors = 0
    total_ref_words = 0
    for ref, hyp in pairs:
        for key, prf in (("r1", rouge_n(ref, hyp, 1)), ("r2", rouge_n(ref, hyp, 2)),
                         ("rl", rouge_l(ref, hyp))):
            acc[key][0] += prf.precision
            acc[key][1] += prf.recall
            acc[key][2] += prf.f1
        meteor_sum += meteor_lite(ref, hyp)
        ref_toks = tokenize(ref)
        if not ref_toks:
            raise DataError("score_corpus: empty reference text")
        total_errors += edit_distance(ref_toks, tokenize(hyp))
        total_ref_words += len(ref_toks)
    mk = lambda key: PRF(acc[key][0] / n, acc[key][1] / n, acc[key][2] / n)
    return ScoreReport(rouge1=mk("r1"), rouge2=mk("r2"), rougeL=mk("rl"),
                       meteor=meteor_sum / n, wer=total_errors / total_ref_words,
                       n_items=n)
