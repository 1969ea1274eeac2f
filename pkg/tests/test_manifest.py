"""Manifest rows, utterance validation, external pair files."""

import numpy as np
import pytest

from speechsum.corpus.features import write_features
from speechsum.corpus.manifest import (ExternalPair, Utterance,
                                       read_external_pairs, read_manifest,
                                       with_role, write_external_pairs,
                                       write_manifest)
from speechsum.errors import DataError


def _speech_utt(tmp_path, uid="u1", frames=5, dim=3, role="asr"):
    mat = np.full((frames, dim), 0.5, dtype=np.float32)
    feat_path = tmp_path / f"{uid}.ssf"
    write_features(feat_path, mat)
    return Utterance(id=uid, modality="speech", role=role, num_frames=frames,
                     transcript="hello there", summary="hello",
                     feat_path=str(feat_path))


def test_speech_round_trip(tmp_path):
    utt = _speech_utt(tmp_path)
    path = tmp_path / "manifest.tsv"
    write_manifest(path, [utt])
    back = read_manifest(path)
    assert len(back) == 1
    got = back[0]
    assert (got.id, got.modality, got.role) == ("u1", "speech", "asr")
    assert got.num_frames == 5
    assert got.transcript == "hello there"
    assert got.summary == "hello"
    assert np.array_equal(got.load_features(), utt.load_features())


def test_feat_paths_written_relative(tmp_path):
    utt = _speech_utt(tmp_path)
    path = tmp_path / "manifest.tsv"
    write_manifest(path, [utt])
    row = path.read_text().splitlines()[0]
    assert row.split("\t")[4] == "u1.ssf"


def test_phoneme_round_trip(tmp_path):
    utt = Utterance(id="p1", modality="phoneme", role="ext", num_frames=4,
                    transcript="a b", summary="a", phoneme_ids=(4, 5, 4, 6))
    path = tmp_path / "manifest.tsv"
    write_manifest(path, [utt])
    got = read_manifest(path)[0]
    assert got.phoneme_ids == (4, 5, 4, 6)
    assert got.feat_path is None


def test_empty_manifest_round_trip(tmp_path):
    path = tmp_path / "manifest.tsv"
    write_manifest(path, [])
    assert read_manifest(path) == []


def test_column_count_error_names_line(tmp_path):
    path = tmp_path / "manifest.tsv"
    path.write_text("a\tb\tc\n")
    with pytest.raises(DataError) as err:
        read_manifest(path)
    assert ":1:" in str(err.value)


def test_bad_frame_count_rejected(tmp_path):
    path = tmp_path / "manifest.tsv"
    path.write_text("u\tspeech\tasr\tmany\tu.ssf\tt\ts\n")
    with pytest.raises(DataError):
        read_manifest(path)


def test_missing_file_is_data_error(tmp_path):
    with pytest.raises(DataError):
        read_manifest(tmp_path / "absent.tsv")


def test_validate_rejects_bad_modality():
    utt = Utterance(id="u", modality="video", role="asr", num_frames=1,
                    transcript="t", summary="s", phoneme_ids=(1,))
    with pytest.raises(DataError):
        utt.validate()


def test_validate_rejects_frame_mismatch():
    utt = Utterance(id="u", modality="phoneme", role="ext", num_frames=3,
                    transcript="t", summary="s", phoneme_ids=(1, 2))
    with pytest.raises(DataError):
        utt.validate()


def test_validate_rejects_frame_cap_excess(tmp_path):
    utt = _speech_utt(tmp_path, frames=20)
    with pytest.raises(DataError):
        utt.validate(frame_cap=10)


def test_validate_rejects_inventory_violation():
    utt = Utterance(id="u", modality="phoneme", role="ext", num_frames=2,
                    transcript="t", summary="s", phoneme_ids=(1, 99))
    with pytest.raises(DataError):
        utt.validate(inventory_size=42)


def test_tab_in_text_rejected_on_write(tmp_path):
    utt = _speech_utt(tmp_path)
    utt.transcript = "has\ttab"
    with pytest.raises(DataError):
        write_manifest(tmp_path / "m.tsv", [utt])


def test_with_role_copies_and_retags(tmp_path):
    utt = _speech_utt(tmp_path, role="asr")
    out = with_role([utt], "sum")
    assert out[0].role == "sum"
    assert utt.role == "asr"
    with pytest.raises(DataError):
        with_role([utt], "nonsense")


def test_external_pairs_round_trip(tmp_path):
    pairs = [ExternalPair(id="e1", document="a b c", summary="a"),
             ExternalPair(id="e2", document="d e", summary="d e")]
    path = tmp_path / "pairs.tsv"
    write_external_pairs(path, pairs)
    assert read_external_pairs(path) == pairs


def test_external_pairs_missing_file(tmp_path):
    with pytest.raises(DataError):
        read_external_pairs(tmp_path / "absent.tsv")
