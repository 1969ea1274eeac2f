"""Stochastic phoneme repetition and the augmented-set builder."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechsum.augment.duration import DurationTable
from speechsum.augment.g2p import PhonemeSequence, g2p
from speechsum.augment.inventory import DEFAULT_INVENTORY
from speechsum.augment.repeat import (build_augmented_set, collapse_runs,
                                      pair_seed, repeat_phonemes)
from speechsum.corpus.manifest import ExternalPair
from speechsum.errors import DataError

LEXICON = {"va": ("V", "AA"), "tu": ("T", "UW"), "mi": ("M", "IY")}


def _seq(ids):
    return PhonemeSequence(ids=tuple(ids), source_words=("w",),
                           oov_flags=(False,))


def _fixed_table(mu, sigma=0.0):
    entries = {name: (mu, sigma) for name in DEFAULT_INVENTORY.names
               if not name.startswith("<")}
    return DurationTable(entries=entries)


class TestRepeat:
    def test_empty_sequence(self):
        rep = repeat_phonemes(_seq([]), _fixed_table(3.0), seed=0)
        assert rep.ids == ()
        assert rep.run_lengths == ()

    def test_zero_sigma_exact_repetition(self):
        ids = [DEFAULT_INVENTORY.id_of("AA"), DEFAULT_INVENTORY.id_of("B")]
        rep = repeat_phonemes(_seq(ids), _fixed_table(3.0), seed=42)
        assert rep.run_lengths == (3, 3)
        assert rep.ids == (ids[0],) * 3 + (ids[1],) * 3

    def test_runs_clamped_to_one(self):
        ids = [DEFAULT_INVENTORY.id_of("AA")] * 5
        table = _fixed_table(0.4, 0.1)
        rep = repeat_phonemes(_seq(ids), table, seed=7)
        assert all(r >= 1 for r in rep.run_lengths)

    def test_boundary_run_single_by_default(self):
        seq = g2p(LEXICON, "va tu")
        rep = repeat_phonemes(seq, _fixed_table(4.0), seed=1)
        wb_positions = [i for i, pid in enumerate(seq.ids)
                        if pid == DEFAULT_INVENTORY.wb_id]
        assert len(wb_positions) == 1
        assert rep.run_lengths[wb_positions[0]] == 1

    def test_deterministic_under_seed(self):
        seq = g2p(LEXICON, "va tu mi")
        table = _fixed_table(3.0, 1.0)
        a = repeat_phonemes(seq, table, seed=123)
        b = repeat_phonemes(seq, table, seed=123)
        assert a == b
        c = repeat_phonemes(seq, table, seed=124)
        assert a != c

    def test_total_length_is_sum_of_runs(self):
        seq = g2p(LEXICON, "va tu")
        rep = repeat_phonemes(seq, _fixed_table(3.0, 1.5), seed=5)
        assert len(rep.ids) == sum(rep.run_lengths)
        assert len(rep.run_lengths) == len(seq.ids)

    def test_pad_id_rejected(self):
        with pytest.raises(DataError):
            repeat_phonemes(_seq([DEFAULT_INVENTORY.pad_id]),
                            _fixed_table(3.0), seed=0)

    def test_sample_mean_near_mu(self):
        ids = [DEFAULT_INVENTORY.id_of("AA")] * 10000
        rep = repeat_phonemes(_seq(ids), _fixed_table(8.0, 1.0), seed=3)
        assert 7.9 <= float(np.mean(rep.run_lengths)) <= 8.1

    def test_collapse_inverse(self):
        seq = g2p(LEXICON, "mi va tu va")
        rep = repeat_phonemes(seq, _fixed_table(3.0, 2.0), seed=11)
        assert collapse_runs(rep) == seq.ids

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from(["AA", "B", "IY", "T"]), max_size=12),
           st.integers(0, 2**31 - 1))
    def test_collapse_inverse_property(self, names, seed):
        ids = tuple(DEFAULT_INVENTORY.id_of(n) for n in names)
        rep = repeat_phonemes(_seq(ids), _fixed_table(2.5, 1.5), seed=seed)
        assert collapse_runs(rep) == ids


class TestPairSeed:
    def test_distinct_ids_distinct_streams(self):
        a = np.random.default_rng(pair_seed(1, "x")).integers(0, 1000, 8)
        b = np.random.default_rng(pair_seed(1, "y")).integers(0, 1000, 8)
        assert not np.array_equal(a, b)

    def test_stable_across_calls(self):
        a = np.random.default_rng(pair_seed(1, "x")).integers(0, 1000, 8)
        b = np.random.default_rng(pair_seed(1, "x")).integers(0, 1000, 8)
        assert np.array_equal(a, b)


class TestBuildAugmentedSet:
    def test_zero_pairs(self):
        out = build_augmented_set([], LEXICON, _fixed_table(3.0), seed=0)
        assert out.utterances == []
        assert out.n_skipped == 0

    def test_pair_becomes_phoneme_utterance(self):
        pairs = [ExternalPair(id="e1", document="va tu", summary="va")]
        out = build_augmented_set(pairs, LEXICON, _fixed_table(3.0), seed=0)
        utt = out.utterances[0]
        assert utt.modality == "phoneme"
        assert utt.role == "ext"
        assert utt.summary == "va"
        assert utt.num_frames == len(utt.phoneme_ids)
        assert all(p < DEFAULT_INVENTORY.size for p in utt.phoneme_ids)

    def test_empty_document_skipped_with_count(self):
        pairs = [ExternalPair(id="e1", document="  ", summary="s"),
                 ExternalPair(id="e2", document="va", summary="va")]
        out = build_augmented_set(pairs, LEXICON, _fixed_table(3.0), seed=0)
        assert out.n_skipped == 1
        assert [u.id for u in out.utterances] == ["e2"]

    def test_deterministic_and_order_independent_per_pair(self):
        pairs = [ExternalPair(id=f"e{i}", document="va tu mi", summary="va")
                 for i in range(4)]
        out1 = build_augmented_set(pairs, LEXICON, _fixed_table(3.0, 1.0),
                                   seed=9)
        out2 = build_augmented_set(list(reversed(pairs)), LEXICON,
                                   _fixed_table(3.0, 1.0), seed=9)
        by_id_1 = {u.id: u.phoneme_ids for u in out1.utterances}
        by_id_2 = {u.id: u.phoneme_ids for u in out2.utterances}
        assert by_id_1 == by_id_2

    def test_ids_differ_across_pairs(self):
        pairs = [ExternalPair(id=f"e{i}", document="va tu mi", summary="va")
                 for i in range(2)]
        out = build_augmented_set(pairs, LEXICON, _fixed_table(3.0, 1.0),
                                  seed=9)
        a, b = out.utterances
        assert a.phoneme_ids != b.phoneme_ids
