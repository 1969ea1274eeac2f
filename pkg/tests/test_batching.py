"""Batch composition: purity, caps, deterministic shuffling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechsum.corpus.manifest import Utterance
from speechsum.errors import ConfigurationError, DataError
from speechsum.training.batching import make_batches


def _utt(uid, frames, modality="speech", role="asr"):
    if modality == "speech":
        return Utterance(id=uid, modality="speech", role=role,
                         num_frames=frames, transcript="t", summary="s",
                         features=np.zeros((frames, 2)))
    return Utterance(id=uid, modality="phoneme", role=role,
                     num_frames=frames, transcript="t", summary="s",
                     phoneme_ids=tuple([4] * frames))


def _mixed_dataset():
    out = []
    for i in range(10):
        out.append(_utt(f"r{i}", 20 + i, "speech", "asr"))
    for i in range(7):
        out.append(_utt(f"s{i}", 30 + i, "speech", "sum"))
    for i in range(9):
        out.append(_utt(f"p{i}", 10 + i, "phoneme", "ext"))
    return out


def test_packing_hand_example():
    utts = [_utt("a", 100), _utt("b", 100), _utt("c", 150)]
    batches = make_batches(utts, "max_total_length", 250, seed=0)
    sizes = sorted(tuple(sorted(u.num_frames for u in b)) for b in batches)
    assert sizes == [(100, 100), (150,)]


def test_oversized_item_forms_singleton():
    utts = [_utt("a", 500), _utt("b", 10)]
    batches = make_batches(utts, "max_total_length", 100, seed=0)
    assert sorted(len(b) for b in batches) == [1, 1]
    assert any(b[0].num_frames == 500 for b in batches)


def test_cap_respected_unless_singleton():
    utts = [_utt(f"u{i}", 30 + i) for i in range(20)]
    for batch in make_batches(utts, "max_total_length", 100, seed=1):
        total = sum(u.num_frames for u in batch)
        assert total <= 100 or len(batch) == 1


def test_fixed_count_sizes():
    utts = [_utt(f"u{i}", 10) for i in range(10)]
    batches = make_batches(utts, "fixed_count", 4, seed=0)
    assert sorted(len(b) for b in batches) == [2, 4, 4]


def test_no_modality_mixing():
    for batch in make_batches(_mixed_dataset(), "fixed_count", 8, seed=3):
        assert len({u.modality for u in batch}) == 1


def test_no_origin_mixing():
    # real roles (asr, sum) never share a batch with artificial (ext)
    for batch in make_batches(_mixed_dataset(), "fixed_count", 8, seed=3):
        origins = {"ext" if u.role == "ext" else "real" for u in batch}
        assert len(origins) == 1


def test_real_roles_may_mix():
    dataset = [_utt(f"a{i}", 10, "speech", "asr") for i in range(3)]
    dataset += [_utt(f"b{i}", 10, "speech", "sum") for i in range(3)]
    batches = make_batches(dataset, "fixed_count", 6, seed=0)
    assert len(batches) == 1


def test_every_item_appears_exactly_once():
    dataset = _mixed_dataset()
    batches = make_batches(dataset, "max_total_length", 90, seed=5)
    seen = [u.id for b in batches for u in b]
    assert sorted(seen) == sorted(u.id for u in dataset)


def test_deterministic_under_seed():
    dataset = _mixed_dataset()
    a = make_batches(dataset, "fixed_count", 4, seed=9)
    b = make_batches(dataset, "fixed_count", 4, seed=9)
    assert [[u.id for u in batch] for batch in a] == \
        [[u.id for u in batch] for batch in b]


def test_order_changes_with_seed():
    dataset = _mixed_dataset()
    a = make_batches(dataset, "fixed_count", 4, seed=9)
    b = make_batches(dataset, "fixed_count", 4, seed=10)
    assert [[u.id for u in batch] for batch in a] != \
        [[u.id for u in batch] for batch in b]


def test_input_order_irrelevant():
    dataset = _mixed_dataset()
    a = make_batches(dataset, "fixed_count", 4, seed=9)
    b = make_batches(list(reversed(dataset)), "fixed_count", 4, seed=9)
    assert [[u.id for u in batch] for batch in a] == \
        [[u.id for u in batch] for batch in b]


def test_unknown_rule_rejected():
    with pytest.raises(ConfigurationError):
        make_batches([_utt("a", 5)], "nonsense", 4, seed=0)


def test_bad_cap_rejected():
    with pytest.raises(ConfigurationError):
        make_batches([_utt("a", 5)], "fixed_count", 0, seed=0)


def test_empty_dataset_rejected():
    with pytest.raises(DataError):
        make_batches([], "fixed_count", 4, seed=0)


@settings(max_examples=1000, deadline=None)
@given(data=st.data())
def test_purity_and_cap_property(data):
    n = data.draw(st.integers(1, 14))
    utts = []
    for i in range(n):
        modality = data.draw(st.sampled_from(["speech", "phoneme"]))
        role = data.draw(st.sampled_from(
            ["asr", "sum"] if modality == "speech" else ["ext"]))
        frames = data.draw(st.integers(1, 60))
        utts.append(_utt(f"u{i}", frames, modality, role))
    rule = data.draw(st.sampled_from(["fixed_count", "max_total_length"]))
    cap = data.draw(st.integers(1, 80))
    seed = data.draw(st.integers(0, 2**31 - 1))

    batches = make_batches(utts, rule, cap, seed)

    seen = sorted(u.id for b in batches for u in b)
    assert seen == sorted(u.id for u in utts)
    for batch in batches:
        assert len({u.modality for u in batch}) == 1
        assert len({"ext" if u.role == "ext" else "real"
                    for u in batch}) == 1
        if rule == "fixed_count":
            assert len(batch) <= cap
        else:
            total = sum(u.num_frames for u in batch)
            assert total <= cap or len(batch) == 1
