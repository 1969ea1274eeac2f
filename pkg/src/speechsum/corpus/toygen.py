"""Deterministic synthetic corpus for desk-scale end-to-end runs.

Construction:

- A small closed vocabulary: two frame words ("learn to"), filler
  words, generated content words, and held-out OOV words that never
  appear in train/valid text.
- Every word gets an opaque pronunciation: a random phoneme string
  from the 39-symbol inventory (all phonemes covered corpus-wide), so
  spelling carries no information and cross-modal transfer must happen
  at the phoneme level.
- A transcript is filler prefix + content words + filler suffix; its
  summary is "learn to" + the content words. Speech features are
  rendered transcript -> phonemes -> duration-repeated frames, each
  phoneme mapping to a fixed random vector plus Gaussian noise.
- Rendering is seeded per transcript, so identical transcripts render
  identically (exactly, when noise_sigma is 0).
- Planted near-duplicates: eval items copying a train item with one
  content word substituted (leakage 11/12 > 0.9 against the pool).
  All other eval items are rejection-sampled to leakage <= 0.88.
- OOV eval items contain one OOV word each; external text pairs are a
  mix of parallel twins of train items and fresh OOV-bearing
  documents, so only stage-(iii) augmentation can teach those words.
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from ..augment.duration import DurationTable
from ..augment.g2p import LETTER_FALLBACK, g2p
from ..augment.inventory import ARPABET, DEFAULT_INVENTORY, PhonemeInventory
from ..augment.repeat import repeat_phonemes
from ..errors import ConfigurationError
from ..leakage.scoring import leakage_score
from .features import write_features
from .manifest import ExternalPair, Utterance, write_external_pairs, write_manifest

FRAME_WORDS = ("learn", "to")
FILLERS = ("okay", "so", "today", "we", "will", "now", "show", "you",
           "please", "watch", "this", "closely", "thanks", "everyone",
           "right", "here")
EVAL_LEAKAGE_CEILING = 0.88

# seed-stream tags, mixed into per-purpose SeedSequences
_S_CONTENT, _S_LEXICON, _S_DURATION, _S_BASEVEC, _S_RENDER, _S_EXTERNAL = range(1, 7)

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


@dataclass
class ToyCorpusSpec:
    seed: int = 1234
    n_train: int = 2000
    n_valid: int = 120
    n_eval: int = 120
    n_external: int = 1200
    n_planted_dups: int = 8
    noise_sigma: float = 0.05
    oov_words: tuple[str, ...] = ()
    n_oov_eval: int = 12
    n_oov_words: int = 4
    n_content_words: int = 40
    content_len: int = 10
    feat_dim: int = 40
    frame_cap: int = 10000
    external_parallel_fraction: float = 0.65

    def validate(self) -> None:
        counts = {"n_train": self.n_train, "n_valid": self.n_valid,
                  "n_eval": self.n_eval, "n_external": self.n_external,
                  "n_planted_dups": self.n_planted_dups, "n_oov_eval": self.n_oov_eval}
        for name, value in counts.items():
            if value < 0:
                raise ConfigurationError(f"{name} must be >= 0, got {value}")
        if self.n_planted_dups + self.n_oov_eval > self.n_eval:
            raise ConfigurationError(
                f"n_planted_dups + n_oov_eval = "
                f"{self.n_planted_dups + self.n_oov_eval} exceeds n_eval = {self.n_eval}")
        if self.n_planted_dups > 0 and self.n_train == 0:
            raise ConfigurationError("planted duplicates need train items to copy")
        if self.content_len < 2 or self.n_content_words < 4:
            raise ConfigurationError("need content_len >= 2 and n_content_words >= 4")
        if self.noise_sigma < 0:
            raise ConfigurationError("noise_sigma must be >= 0")


@dataclass
class ToyCorpus:
    spec: ToyCorpusSpec
    root: Path
    train: list[Utterance]
    valid: list[Utterance]
    eval: list[Utterance]
    external_pairs: list[ExternalPair]
    lexicon: dict[str, tuple[str, ...]]
    durations: DurationTable
    meta: dict
    inventory: PhonemeInventory = field(default_factory=lambda: DEFAULT_INVENTORY)


def _make_words(rng: np.random.Generator, count: int, taken: set[str],
                banned_prefixes: set[str] | None = None) -> list[str]:
    """Sample CV-syllable words not in ``taken``.

    With ``banned_prefixes``, the first syllable must also be new; used
    for external-only words so none is a spelling neighbor of a spoken
    word (otherwise the neighbor captures the decode at the second
    subword piece and the emission test measures lexical ambiguity
    instead of modality transfer).
    """
    words: list[str] = []
    while len(words) < count:
        n_syll = int(rng.integers(2, 4))
        word = "".join(_CONSONANTS[rng.integers(len(_CONSONANTS))]
                       + _VOWELS[rng.integers(len(_VOWELS))]
                       for _ in range(n_syll))
        if word in taken:
            continue
        if banned_prefixes is not None:
            if word[:2] in banned_prefixes:
                continue
            banned_prefixes.add(word[:2])
        taken.add(word)
        words.append(word)
    return words


def _make_lexicon(words: list[str]) -> dict[str, tuple[str, ...]]:
    """Spelling-derived pronunciations via the letter table.

    Letter-transparent entries keep sub-word acoustics consistent across
    words, so a word seen only in text shares phoneme spans with spoken
    training words. Pronunciations must stay unique so words remain
    acoustically separable.
    """
    lexicon: dict[str, tuple[str, ...]] = {}
    for word in words:
        pron: list[str] = []
        for ch in word:
            pron.extend(LETTER_FALLBACK[ch])
        lexicon[word] = tuple(pron)
    seen: dict[tuple[str, ...], str] = {}
    for word, pron in lexicon.items():
        other = seen.setdefault(pron, word)
        if other != word:
            raise ConfigurationError(f"homophone pair {other!r}/{word!r} in toy lexicon")
    return lexicon


def _make_durations(rng: np.random.Generator) -> DurationTable:
    entries = {name: (round(float(rng.uniform(2.0, 3.5)), 3),
                      round(float(rng.uniform(0.15, 0.45)), 3))
               for name in sorted(ARPABET)}
    return DurationTable(entries=entries)


@dataclass
class _Item:
    prefix: list[str]
    content: list[str]
    suffix: list[str]

    @property
    def transcript(self) -> str:
        return " ".join(self.prefix + self.content + self.suffix)

    @property
    def summary(self) -> str:
        return " ".join(list(FRAME_WORDS) + self.content)


class _Sampler:
    def __init__(self, rng: np.random.Generator, content_words: list[str], content_len: int):
        self.rng = rng
        self.content_words = content_words
        self.content_len = content_len

    def item(self) -> _Item:
        rng = self.rng
        prefix = [FILLERS[i] for i in rng.choice(len(FILLERS), size=3, replace=False)]
        suffix = [FILLERS[i] for i in rng.choice(len(FILLERS), size=2, replace=False)]
        content = [self.content_words[i]
                   for i in rng.integers(0, len(self.content_words), size=self.content_len)]
        return _Item(prefix=prefix, content=content, suffix=suffix)


class _Renderer:
    """transcript -> phonemes -> duration-repeated frames -> features."""

    def __init__(self, spec: ToyCorpusSpec, lexicon: dict[str, tuple[str, ...]],
                 durations: DurationTable, inventory: PhonemeInventory):
        self.spec = spec
        self.lexicon = lexicon
        self.durations = durations
        self.inventory = inventory
        base_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, _S_BASEVEC]))
        self.base_vectors = base_rng.normal(0.0, 1.0, size=(inventory.size, spec.feat_dim))

    def render(self, transcript: str) -> np.ndarray:
        ss = np.random.SeedSequence(
            [self.spec.seed, _S_RENDER, zlib.crc32(transcript.encode("utf-8"))])
        dur_seed, noise_seed = ss.spawn(2)
        seq = g2p(self.lexicon, transcript, self.inventory)
        rep = repeat_phonemes(seq, self.durations, dur_seed, self.inventory)
        ids = np.asarray(rep.ids[: self.spec.frame_cap], dtype=np.int64)
        feats = self.base_vectors[ids]
        if self.spec.noise_sigma > 0:
            noise = np.random.default_rng(noise_seed).normal(0.0, 1.0, size=feats.shape)
            feats = feats + self.spec.noise_sigma * noise
        return feats.astype(np.float32)


def generate_toy_corpus(spec: ToyCorpusSpec, out_dir: str | Path,
                        inventory: PhonemeInventory = DEFAULT_INVENTORY) -> ToyCorpus:
    """Build the corpus under ``out_dir``; deterministic under spec.seed."""
    spec.validate()
    root = Path(out_dir)
    (root / "feats").mkdir(parents=True, exist_ok=True)

    word_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, _S_LEXICON]))
    taken = set(FRAME_WORDS) | set(FILLERS)
    content_words = _make_words(word_rng, spec.n_content_words, taken)
    if spec.oov_words:
        oov_words = tuple(spec.oov_words)
        overlap = set(oov_words) & (set(FRAME_WORDS) | set(FILLERS) | set(content_words))
        if overlap:
            raise ConfigurationError(
                f"oov_words overlap the base vocabulary: {sorted(overlap)}")
        if len(set(oov_words)) != len(oov_words):
            raise ConfigurationError("oov_words contains duplicates")
        taken.update(oov_words)
    else:
        banned = {w[:2] for w in taken}
        oov_words = tuple(_make_words(word_rng, spec.n_oov_words, taken, banned))
    if spec.n_oov_eval > 0 and not oov_words:
        raise ConfigurationError("n_oov_eval > 0 requires oov_words")

    all_words = sorted(set(FRAME_WORDS) | set(FILLERS) | set(content_words) | set(oov_words))
    lexicon = _make_lexicon(all_words)
    durations = _make_durations(
        np.random.default_rng(np.random.SeedSequence([spec.seed, _S_DURATION])))
    renderer = _Renderer(spec, lexicon, durations, inventory)

    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, _S_CONTENT]))
    sampler = _Sampler(rng, content_words, spec.content_len)

    train_items = [sampler.item() for _ in range(spec.n_train)]
    valid_items = [sampler.item() for _ in range(spec.n_valid)]

    pool: dict[str, str] = {}
    for i, item in enumerate(train_items):
        pool[f"train-{i:04d}"] = item.summary
    for i, item in enumerate(valid_items):
        pool[f"valid-{i:04d}"] = item.summary

    def leakage_ok(item: _Item) -> bool:
        if not pool:
            return True
        score, _ = leakage_score(item.summary, pool)
        return score <= EVAL_LEAKAGE_CEILING

    n_regular = spec.n_eval - spec.n_planted_dups - spec.n_oov_eval
    regular_items: list[tuple[_Item, dict]] = []
    for _ in range(n_regular):
        item = sampler.item()
        while not leakage_ok(item):
            item = sampler.item()
        regular_items.append((item, {"kind": "regular"}))

    planted_items: list[tuple[_Item, dict]] = []
    if spec.n_planted_dups > 0:
        twin_idx = rng.choice(spec.n_train, size=spec.n_planted_dups, replace=False)
        for raw_idx in twin_idx:
            idx = int(raw_idx)
            twin = train_items[idx]
            while True:
                pos = int(rng.integers(spec.content_len))
                replacement = content_words[int(rng.integers(len(content_words)))]
                if replacement == twin.content[pos]:
                    continue
                content = list(twin.content)
                content[pos] = replacement
                item = _Item(prefix=list(twin.prefix), content=content,
                             suffix=list(twin.suffix))
                score, _ = leakage_score(item.summary, pool)
                if 0.9 < score < 1.0:
                    break
            planted_items.append((item, {"kind": "planted", "train_id": f"train-{idx:04d}",
                                         "score": score}))

    oov_items: list[tuple[_Item, dict]] = []
    for j in range(spec.n_oov_eval):
        word = oov_words[j % len(oov_words)]
        while True:
            item = sampler.item()
            item.content[int(rng.integers(spec.content_len))] = word
            if leakage_ok(item):
                break
        oov_items.append((item, {"kind": "oov", "word": word}))

    tagged = regular_items + planted_items + oov_items
    order = rng.permutation(len(tagged))
    eval_items = [tagged[int(i)] for i in order]

    n_parallel = int(round(spec.n_external * spec.external_parallel_fraction))
    n_parallel = min(n_parallel, spec.n_external)
    if spec.n_train == 0:
        n_parallel = 0
    ext_rng = np.random.default_rng(np.random.SeedSequence([spec.seed, _S_EXTERNAL]))
    ext_sampler = _Sampler(ext_rng, content_words, spec.content_len)
    external: list[ExternalPair] = []
    for i in range(n_parallel):
        twin = train_items[i % spec.n_train]
        external.append(ExternalPair(id=f"ext-par-{i:05d}", document=twin.transcript,
                                     summary=twin.summary))
    for i in range(spec.n_external - n_parallel):
        item = ext_sampler.item()
        word = oov_words[i % len(oov_words)] if oov_words else None
        if word is not None:
            item.content[int(ext_rng.integers(spec.content_len))] = word
        external.append(ExternalPair(id=f"ext-oov-{i:05d}", document=item.transcript,
                                     summary=item.summary))

    def build_split(name: str, items: list[_Item]) -> list[Utterance]:
        utts = []
        for i, item in enumerate(items):
            uid = f"{name}-{i:04d}"
            feats = renderer.render(item.transcript)
            feat_path = root / "feats" / f"{uid}.ssf"
            write_features(feat_path, feats)
            utts.append(Utterance(id=uid, modality="speech", role="sum",
                                  num_frames=feats.shape[0], transcript=item.transcript,
                                  summary=item.summary, feat_path=str(feat_path),
                                  features=feats))
        return utts

    train = build_split("train", train_items)
    valid = build_split("valid", valid_items)
    eval_split = build_split("eval", [item for item, _ in eval_items])

    planted_meta = []
    oov_meta = []
    for utt, (_, tag) in zip(eval_split, eval_items):
        if tag["kind"] == "planted":
            planted_meta.append({"eval_id": utt.id, "train_id": tag["train_id"],
                                 "score": tag["score"]})
        elif tag["kind"] == "oov":
            oov_meta.append({"eval_id": utt.id, "word": tag["word"]})
    planted_meta.sort(key=lambda d: d["eval_id"])
    oov_meta.sort(key=lambda d: d["eval_id"])

    def write_role_manifests(name: str, utts: list[Utterance]) -> None:
        for role, suffix in (("asr", "asr"), ("sum", "sum")):
            tagged_utts = [
                Utterance(id=u.id, modality=u.modality, role=role,
                          num_frames=u.num_frames, transcript=u.transcript,
                          summary=u.summary, feat_path=u.feat_path)
                for u in utts
            ]
            write_manifest(root / f"{name}_{suffix}.tsv", tagged_utts)

    write_role_manifests("train", train)
    write_role_manifests("valid", valid)
    write_role_manifests("eval", eval_split)
    write_external_pairs(root / "external_pairs.tsv", external)

    from ..augment.g2p import save_lexicon
    save_lexicon(root / "lexicon.txt", lexicon)
    durations.save(root / "durations.tsv")

    meta = {
        "spec": asdict(spec),
        "frame_words": list(FRAME_WORDS),
        "fillers": list(FILLERS),
        "content_words": content_words,
        "oov_words": list(oov_words),
        "base_vocab": sorted(set(FRAME_WORDS) | set(FILLERS) | set(content_words)),
        "planted": planted_meta,
        "oov_eval": oov_meta,
        "n_external_parallel": n_parallel,
        "n_external_oov": spec.n_external - n_parallel,
    }
    (root / "meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                    encoding="utf-8")

    return ToyCorpus(spec=spec, root=root, train=train, valid=valid, eval=eval_split,
                     external_pairs=external, lexicon=lexicon, durations=durations,
                     meta=meta, inventory=inventory)
