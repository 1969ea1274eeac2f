"""Lexicon-based grapheme-to-phoneme conversion with a letter fallback.

Known words resolve through a pronunciation lexicon (stress digits are
stripped on load). OOV words expand letter by letter through a fixed
fallback table and are flagged. A word-boundary symbol separates
adjacent words.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from ..errors import ConfigurationError, DataError
from .inventory import DEFAULT_INVENTORY, PhonemeInventory

# deterministic letter expansion for words missing from the lexicon
LETTER_FALLBACK: dict[str, tuple[str, ...]] = {
    "a": ("AE",), "b": ("B",), "c": ("K",), "d": ("D",), "e": ("EH",),
    "f": ("F",), "g": ("G",), "h": ("HH",), "i": ("IH",), "j": ("JH",),
    "k": ("K",), "l": ("L",), "m": ("M",), "n": ("N",), "o": ("AA",),
    "p": ("P",), "q": ("K",), "r": ("R",), "s": ("S",), "t": ("T",),
    "u": ("AH",), "v": ("V",), "w": ("W",), "x": ("K", "S"), "y": ("Y",),
    "z": ("Z",),
}


def _strip_stress(symbol: str) -> str:
    return symbol.rstrip("0123456789")


def load_lexicon(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Read "word TAB phoneme list" lines, stripping stress digits."""
    lexicon: dict[str, tuple[str, ...]] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'word<TAB>phonemes'")
        word, phones = parts
        symbols = tuple(_strip_stress(p) for p in phones.split())
        if not symbols:
            raise DataError(f"{path}:{lineno}: empty pronunciation for {word!r}")
        lexicon[word] = symbols
    return lexicon


def save_lexicon(path: str | Path, lexicon: dict[str, tuple[str, ...]]) -> None:
    lines = [f"{word}\t{' '.join(phones)}" for word, phones in sorted(lexicon.items())]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


@dataclass
class PhonemeSequence:
    """Phoneme ids for a word sequence, one boundary id between words."""

    ids: tuple[int, ...]
    source_words: tuple[str, ...]
    oov_flags: tuple[bool, ...]


def g2p(lexicon: dict[str, tuple[str, ...]], words: str,
        inventory: PhonemeInventory = DEFAULT_INVENTORY) -> PhonemeSequence:
    """Convert a word sequence to phoneme ids.

    Lexicon hits use the stored pronunciation; misses fall back to the
    letter table (unknown characters become <unk>) and set the word's
    oov flag.
    """
    if not lexicon:
        raise ConfigurationError("g2p requires a non-empty lexicon")
    word_list = tuple(words.split())
    ids: list[int] = []
    flags: list[bool] = []
    for i, word in enumerate(word_list):
        if i > 0:
            ids.append(inventory.wb_id)
        pron = lexicon.get(word)
        if pron is not None:
            flags.append(False)
            symbols = [_strip_stress(p) for p in pron]
        else:
            flags.append(True)
            symbols = []
            for ch in word:
                symbols.extend(LETTER_FALLBACK.get(ch, ("<unk>",)))
        for sym in symbols:
            if sym == "<unk>":
                ids.append(inventory.unk_id)
            else:
                ids.append(inventory.id_of(sym))
    return PhonemeSequence(ids=tuple(ids), source_words=word_list, oov_flags=tuple(flags))
