"""Classic Porter (1980) stemmer, implemented from the published rules.

Used by the light METEOR variant's stem-match stage. Words shorter
than three characters are returned unchanged, per the original.
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of VC sequences in the [C](VC)^m[V] decomposition."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        vowel = not _is_consonant(stem, i)
        if prev_vowel and not vowel:
            m += 1
        prev_vowel = vowel
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (len(word) >= 2 and word[-1] == word[-2]
            and _is_consonant(word, len(word) - 1))


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (_is_consonant(word, len(word) - 3)
            and not _is_consonant(word, len(word) - 2)
            and _is_consonant(word, len(word) - 1)):
        return False
    return word[-1] not in "wxy"


def _replace(word: str, suffix: str, repl: str, min_measure: int) -> str | None:
    """If word ends with suffix and the stem measure is large enough, swap."""
    if not word.endswith(suffix):
        return None
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) > min_measure:
        return stem + repl
    return word


def porter_stem(word: str) -> str:
    if len(word) <= 2:
        return word
    b = word

    # step 1a
    if b.endswith("sses"):
        b = b[:-2]
    elif b.endswith("ies"):
        b = b[:-2]
    elif not b.endswith("ss") and b.endswith("s"):
        b = b[:-1]

    # step 1b
    did_1b = False
    if b.endswith("eed"):
        if _measure(b[:-3]) > 0:
            b = b[:-1]
    elif b.endswith("ed") and _has_vowel(b[:-2]):
        b = b[:-2]
        did_1b = True
    elif b.endswith("ing") and _has_vowel(b[:-3]):
        b = b[:-3]
        did_1b = True
    if did_1b:
        if b.endswith(("at", "bl", "iz")):
            b = b + "e"
        elif _ends_double_consonant(b) and b[-1] not in "lsz":
            b = b[:-1]
        elif _measure(b) == 1 and _ends_cvc(b):
            b = b + "e"

    # step 1c
    if b.endswith("y") and _has_vowel(b[:-1]):
        b = b[:-1] + "i"

    # step 2
    for suffix, repl in (
            ("ational", "ate"), ("tional", "tion"), ("enci", "ence"),
            ("anci", "ance"), ("izer", "ize"), ("abli", "able"),
            ("alli", "al"), ("entli", "ent"), ("eli", "e"), ("ousli", "ous"),
            ("ization", "ize"), ("ation", "ate"), ("ator", "ate"),
            ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
            ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"),
            ("biliti", "ble")):
        out = _replace(b, suffix, repl, 0)
        if out is not None:
            b = out
            break

    # step 3
    for suffix, repl in (
            ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
            ("ical", "ic"), ("ful", ""), ("ness", "")):
        out = _replace(b, suffix, repl, 0)
        if out is not None:
            b = out
            break

    # step 4
    for suffix in ("al", "ance", "ence", "er", "ic", "able", "ible", "ant",
                   "ement", "ment", "ent", "ion", "ou", "ism", "ate", "iti",
                   "ous", "ive", "ize"):
        if b.endswith(suffix):
            stem = b[: len(b) - len(suffix)]
            if _measure(stem) > 1:
                if suffix == "ion" and not stem.endswith(("s", "t")):
                    continue
                b = stem
            break

    # step 5a
    if b.endswith("e"):
        stem = b[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            b = stem

    # step 5b
    if _measure(b) > 1 and _ends_double_consonant(b) and b.endswith("l"):
        b = b[:-1]

    return b
