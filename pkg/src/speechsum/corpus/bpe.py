"""Byte-pair-encoding subword tokenizer trained from scratch on word sequences.

Conventions, pinned for reproducibility:

- Special tokens occupy fixed ids: <sos>=0, <eos>=1, <unk>=2, <pad>=3.
  Neither encode nor decode inserts <sos>/<eos>; callers add them.
- A word is split into characters, with the end-of-word marker "</w>"
  fused onto the final character ("low" -> ["l", "o", "w</w>"]), so word
  boundaries survive the merge process and decode can rebuild the text.
- Merges are learned greedily: highest pair frequency first, ties broken
  by lexicographic order of the (left, right) pair.
- The vocabulary has exactly the requested size: specials, then the
  sorted initial alphabet, then merge outputs in merge order. If the
  corpus runs out of mergeable pairs first, the remaining slots are
  filled with inert "<unused."N">" entries.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from ..errors import ConfigurationError, DataError, FormatError, RangeError

SOS_ID, EOS_ID, UNK_ID, PAD_ID = 0, 1, 2, 3
SPECIALS = ("<sos>", "<eos>", "<unk>", "<pad>")
WORD_END = "</w>"


def _word_symbols(word: str) -> tuple[str, ...]:
    chars = list(word)
    chars[-1] = chars[-1] + WORD_END
    return tuple(chars)


@dataclass
class BpeModel:
    vocab: list[str]
    merges: list[tuple[str, str]]
    token_to_id: dict[str, int] = field(init=False, repr=False)
    merge_rank: dict[tuple[str, str], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.token_to_id = {tok: i for i, tok in enumerate(self.vocab)}
        self.merge_rank = {pair: i for i, pair in enumerate(self.merges)}

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"SSBPE 1 {len(self.vocab)} {len(self.merges)}\n")
            for tok in self.vocab:
                f.write(tok + "\n")
            for left, right in self.merges:
                f.write(f"{left}\t{right}\n")

    @classmethod
    def load(cls, path: str | Path) -> "BpeModel":
        try:
            with open(path, encoding="utf-8") as f:
                lines = f.read().split("\n")
        except OSError as exc:
            raise DataError(f"cannot read {path}: {exc}") from exc
        header = lines[0].split()
        if len(header) != 4 or header[0] != "SSBPE" or header[1] != "1":
            raise FormatError(f"{path}: bad tokenizer header {lines[0]!r}")
        n_vocab, n_merges = int(header[2]), int(header[3])
        vocab = lines[1 : 1 + n_vocab]
        merges = []
        for line in lines[1 + n_vocab : 1 + n_vocab + n_merges]:
            left, right = line.split("\t")
            merges.append((left, right))
        if len(vocab) != n_vocab or len(merges) != n_merges:
            raise FormatError(f"{path}: truncated tokenizer file")
        return cls(vocab=vocab, merges=merges)


def train_bpe(texts: Iterable[str], vocab_size: int) -> BpeModel:
    """Learn a BPE vocabulary of exactly ``vocab_size`` entries.

    Args:
        texts: word-sequence strings (whitespace separated).
        vocab_size: target size, specials included. Must cover the
            specials plus every distinct initial symbol.
    """
    word_freq: Counter[str] = Counter()
    for text in texts:
        word_freq.update(text.split())

    words: dict[tuple[str, ...], int] = {}
    alphabet: set[str] = set()
    for word, freq in word_freq.items():
        syms = _word_symbols(word)
        words[syms] = words.get(syms, 0) + freq
        alphabet.update(syms)

    minimum = len(SPECIALS) + len(alphabet)
    if vocab_size < minimum:
        raise ConfigurationError(
            f"vocab_size={vocab_size} too small: need at least {minimum} "
            f"({len(SPECIALS)} specials + {len(alphabet)} initial symbols)"
        )

    vocab = list(SPECIALS) + sorted(alphabet)
    merges: list[tuple[str, str]] = []
    while len(vocab) < vocab_size:
        pair_counts: Counter[tuple[str, str]] = Counter()
        for syms, freq in words.items():
            for a, b in zip(syms, syms[1:]):
                pair_counts[(a, b)] += freq
        if not pair_counts:
            break
        best = min(pair_counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        merged = best[0] + best[1]
        new_words: dict[tuple[str, ...], int] = {}
        for syms, freq in words.items():
            out = []
            i = 0
            while i < len(syms):
                if i + 1 < len(syms) and syms[i] == best[0] and syms[i + 1] == best[1]:
                    out.append(merged)
                    i += 2
                else:
                    out.append(syms[i])
                    i += 1
            key = tuple(out)
            new_words[key] = new_words.get(key, 0) + freq
        words = new_words
        merges.append(best)
        vocab.append(merged)

    # pair supply exhausted before the target size: pad with inert entries
    n_unused = 0
    while len(vocab) < vocab_size:
        vocab.append(f"<unused{n_unused}>")
        n_unused += 1
    return BpeModel(vocab=vocab, merges=merges)


def _encode_word(model: BpeModel, word: str) -> list[str]:
    syms = list(_word_symbols(word))
    while len(syms) > 1:
        best_rank = None
        best_idx = -1
        for i, pair in enumerate(zip(syms, syms[1:])):
            rank = model.merge_rank.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
                best_idx = i
        if best_rank is None:
            break
        syms[best_idx : best_idx + 2] = [syms[best_idx] + syms[best_idx + 1]]
    return syms


def bpe_encode(model: BpeModel, text: str) -> list[int]:
    """Encode a word sequence into token ids; unknown symbols map to <unk>."""
    ids: list[int] = []
    for word in text.split():
        for sym in _encode_word(model, word):
            ids.append(model.token_to_id.get(sym, UNK_ID))
    return ids


def bpe_decode(model: BpeModel, ids: Sequence[int]) -> str:
    """Decode token ids back into a word sequence.

    Specials are skipped; ids outside the vocabulary raise RangeError.
    """
    words: list[str] = []
    current = ""
    for tid in ids:
        if tid < 0 or tid >= len(model.vocab):
            raise RangeError(f"token id {tid} outside vocabulary of size {len(model.vocab)}")
        if tid in (SOS_ID, EOS_ID, PAD_ID):
            continue
        sym = "<unk>" if tid == UNK_ID else model.vocab[tid]
        if sym.endswith(WORD_END):
            current += sym[: -len(WORD_END)]
            words.append(current)
            current = ""
        else:
            current += sym
    if current:
        words.append(current)
    return " ".join(words)
