"""Subword tokenizer: vocabulary construction, merges, round trips."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechsum.corpus.bpe import (EOS_ID, PAD_ID, SOS_ID, UNK_ID, BpeModel,
                                  bpe_decode, bpe_encode, train_bpe)
from speechsum.errors import ConfigurationError, DataError, RangeError


def test_special_ids_fixed():
    model = train_bpe(["a b"], 6)
    assert (SOS_ID, EOS_ID, UNK_ID, PAD_ID) == (0, 1, 2, 3)
    assert model.vocab[0] == "<sos>"
    assert model.vocab[1] == "<eos>"
    assert model.vocab[2] == "<unk>"
    assert model.vocab[3] == "<pad>"


def test_minimal_vocab_no_merges():
    model = train_bpe(["a b", "a b"], 6)
    assert model.vocab_size == 6
    assert model.merges == []
    assert set(model.vocab) == {"<sos>", "<eos>", "<unk>", "<pad>",
                                "a</w>", "b</w>"}


def test_first_merge_by_pair_frequency():
    model = train_bpe(["low low low", "lowest"], 12)
    assert model.vocab_size == 12
    assert model.merges[0] == ("l", "o")


def test_merged_word_becomes_single_token():
    model = train_bpe(["low low low", "lowest"], 30)
    ids = bpe_encode(model, "low")
    assert len(ids) == 1
    assert bpe_decode(model, ids) == "low"


def test_vocab_size_exact():
    for size in (13, 16, 24):
        model = train_bpe(["low lower lowest", "new newer newest"], size)
        assert model.vocab_size == size
        assert len(model.vocab) == size


def test_vocab_too_small_names_minimum():
    with pytest.raises(ConfigurationError) as err:
        train_bpe(["abcdef"], 5)
    assert "10" in str(err.value)


def test_exhausted_merges_pad_to_exact_size():
    # one word admits only so many merges; inert entries fill the rest
    model = train_bpe(["ab"], 12)
    assert model.vocab_size == 12
    assert any(tok.startswith("<unused") for tok in model.vocab)
    assert bpe_decode(model, bpe_encode(model, "ab")) == "ab"


def test_encode_empty_string():
    model = train_bpe(["a b"], 6)
    assert bpe_encode(model, "") == []
    assert bpe_decode(model, []) == ""


def test_round_trip_simple():
    model = train_bpe(["learn to draw", "learn to paint"], 40)
    ids = bpe_encode(model, "learn to draw")
    assert bpe_decode(model, ids) == "learn to draw"


def test_unknown_character_maps_to_unk():
    model = train_bpe(["a b"], 6)
    ids = bpe_encode(model, "a z")
    assert UNK_ID in ids
    assert bpe_decode(model, ids).split() == ["a", "<unk>"]


def test_decode_out_of_range_id():
    model = train_bpe(["a b"], 6)
    with pytest.raises(RangeError):
        bpe_decode(model, [0, 99])


def test_decode_rejects_negative_id():
    model = train_bpe(["a b"], 6)
    with pytest.raises(RangeError):
        bpe_decode(model, [-1])


def test_merge_determinism():
    texts = ["the cat sat on the mat", "the dog sat on the log"]
    first = train_bpe(texts, 40)
    second = train_bpe(texts, 40)
    assert first.vocab == second.vocab
    assert first.merges == second.merges


def test_tie_break_lexicographic():
    # both candidate pairs occur once; the lexicographically smaller wins
    model = train_bpe(["ab cd"], 12)
    assert model.merges[0] == ("a", "b</w>")


def test_round_trip_1000_random_strings(rng):
    # training texts cover every letter in final and non-final position
    alphabet = "abcde"
    texts = ["a b c d e", "ab bc cd de ea", "abc cde eab dda"]
    model = train_bpe(texts, 30)
    for _ in range(1000):
        n_words = int(rng.integers(1, 5))
        words = ["".join(rng.choice(list(alphabet), size=rng.integers(1, 7)))
                 for _ in range(n_words)]
        text = " ".join(words)
        assert bpe_decode(model, bpe_encode(model, text)) == text


@settings(max_examples=150, deadline=None)
@given(st.lists(st.text(alphabet="abc", min_size=1, max_size=6),
                min_size=1, max_size=4))
def test_round_trip_property(words):
    model = train_bpe(["abc cab bca", "aa bb cc"], 20)
    text = " ".join(words)
    assert bpe_decode(model, bpe_encode(model, text)) == text


def test_save_load_round_trip(tmp_path):
    model = train_bpe(["low lower lowest", "slow slower"], 30)
    path = tmp_path / "bpe.model"
    model.save(path)
    back = BpeModel.load(path)
    assert back.vocab == model.vocab
    assert back.merges == model.merges
    text = "low slower"
    assert bpe_encode(back, text) == bpe_encode(model, text)


def test_load_missing_file_is_data_error(tmp_path):
    with pytest.raises(DataError):
        BpeModel.load(tmp_path / "absent.model")
