"""Grapheme-to-phoneme conversion and the phoneme inventory."""

import pytest

from speechsum.augment.g2p import (LETTER_FALLBACK, PhonemeSequence, g2p,
                                   load_lexicon, save_lexicon)
from speechsum.augment.inventory import ARPABET, DEFAULT_INVENTORY
from speechsum.errors import ConfigurationError, DataError, RangeError

LEXICON = {"cat": ("K", "AE1", "T"), "dog": ("D", "AO1", "G"),
           "the": ("DH", "AH0",)}


def _names(seq: PhonemeSequence) -> list[str]:
    return [DEFAULT_INVENTORY.name_of(i) for i in seq.ids]


class TestInventory:
    def test_size_is_42(self):
        assert DEFAULT_INVENTORY.size == 42
        assert len(ARPABET) == 39

    def test_specials_present(self):
        names = DEFAULT_INVENTORY.names
        assert "<wb>" in names
        assert "<unk>" in names
        assert "<pad>" in names

    def test_name_id_round_trip(self):
        for name in DEFAULT_INVENTORY.names:
            assert DEFAULT_INVENTORY.name_of(
                DEFAULT_INVENTORY.id_of(name)) == name

    def test_unknown_name_rejected(self):
        with pytest.raises(RangeError):
            DEFAULT_INVENTORY.id_of("QQ")
        with pytest.raises(RangeError):
            DEFAULT_INVENTORY.name_of(99)


class TestG2p:
    def test_empty_string(self):
        seq = g2p(LEXICON, "")
        assert seq.ids == ()
        assert seq.oov_flags == ()

    def test_lexicon_hit_strips_stress(self):
        seq = g2p(LEXICON, "cat")
        assert _names(seq) == ["K", "AE", "T"]
        assert seq.oov_flags == (False,)

    def test_word_boundary_between_words(self):
        seq = g2p(LEXICON, "cat dog")
        names = _names(seq)
        assert names == ["K", "AE", "T", "<wb>", "D", "AO", "G"]
        assert names.count("<wb>") == 1

    def test_fallback_flags_oov(self):
        seq = g2p(LEXICON, "zzqx")
        assert seq.oov_flags == (True,)
        expected = []
        for ch in "zzqx":
            expected.extend(LETTER_FALLBACK[ch])
        assert _names(seq) == list(expected)

    def test_fallback_deterministic(self):
        a = g2p(LEXICON, "brandnew word")
        b = g2p(LEXICON, "brandnew word")
        assert a == b

    def test_unknown_character_becomes_unk(self):
        seq = g2p(LEXICON, "a#b")
        assert DEFAULT_INVENTORY.unk_id in seq.ids

    def test_empty_lexicon_rejected(self):
        with pytest.raises(ConfigurationError):
            g2p({}, "cat")

    def test_all_ids_within_inventory(self):
        seq = g2p(LEXICON, "the cat dog unseen words here")
        assert all(0 <= i < DEFAULT_INVENTORY.size for i in seq.ids)


class TestLexiconFile:
    def test_round_trip_strips_stress(self, tmp_path):
        path = tmp_path / "lex.txt"
        save_lexicon(path, LEXICON)
        back = load_lexicon(path)
        assert back == {"cat": ("K", "AE", "T"), "dog": ("D", "AO", "G"),
                        "the": ("DH", "AH")}

    def test_tab_separated_format(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("cat\tK AE1 T\n")
        assert load_lexicon(path) == {"cat": ("K", "AE", "T")}

    def test_stress_free_lexicon_round_trips_exactly(self, tmp_path):
        lex = {"va": ("V", "AA"), "tu": ("T", "UW")}
        path = tmp_path / "lex.txt"
        save_lexicon(path, lex)
        assert load_lexicon(path) == lex

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "lex.txt"
        path.write_text("just-a-word-no-tab\n")
        with pytest.raises(DataError):
            load_lexicon(path)

    def test_missing_file_is_data_error(self, tmp_path):
        with pytest.raises(DataError):
            load_lexicon(tmp_path / "absent.txt")
