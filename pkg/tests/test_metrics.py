"""Scoring metrics against hand-derived values and brute-force oracles."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from speechsum.errors import DataError
from speechsum.eval.metrics import (ScoreReport, edit_distance, lcs_length,
                                    meteor_lite, rouge_l, rouge_n,
                                    score_corpus, tokenize, wer)


def lcs_recursive(a, b):
    """Brute-force LCS used as an independent oracle."""
    if not a or not b:
        return 0
    if a[-1] == b[-1]:
        return 1 + lcs_recursive(a[:-1], b[:-1])
    return max(lcs_recursive(a[:-1], b), lcs_recursive(a, b[:-1]))


class TestTokenize:
    def test_lowercase_and_split(self):
        assert tokenize("The Cat SAT") == ["the", "cat", "sat"]

    def test_terminal_punctuation_separated(self):
        assert tokenize("hello, world.") == ["hello", ",", "world", "."]

    def test_whitespace_invariance(self):
        assert tokenize("  a  b \n") == tokenize("a b")

    def test_empty(self):
        assert tokenize("") == []


class TestRougeN:
    def test_identical(self):
        out = rouge_n("a b c", "a b c", 1)
        assert (out.precision, out.recall, out.f1) == (1.0, 1.0, 1.0)

    def test_clipped_unigram_example(self):
        out = rouge_n("the cat sat on the mat", "the cat the mat", 1)
        # "the" clipped at 2; matches = the,the,cat,mat = 4
        assert out.precision == pytest.approx(1.0, abs=1e-9)
        assert out.recall == pytest.approx(4 / 6, abs=1e-9)
        assert out.f1 == pytest.approx(0.8, abs=1e-9)

    def test_disjoint(self):
        out = rouge_n("a b", "c d", 1)
        assert (out.precision, out.recall, out.f1) == (0.0, 0.0, 0.0)

    def test_bigram(self):
        out = rouge_n("a b c d", "a b x d", 2)
        # hyp bigrams: ab bx xd; ref: ab bc cd -> 1 match
        assert out.precision == pytest.approx(1 / 3, abs=1e-9)
        assert out.recall == pytest.approx(1 / 3, abs=1e-9)

    def test_empty_sides_zero(self):
        assert rouge_n("", "a", 1).f1 == 0.0
        assert rouge_n("a", "", 1).f1 == 0.0
        assert rouge_n("", "", 1).f1 == 0.0

    def test_hyp_shorter_than_n(self):
        assert rouge_n("a b c", "a", 2).f1 == 0.0


class TestRougeL:
    def test_identical(self):
        assert rouge_l("x y z", "x y z").f1 == 1.0

    def test_hand_dp_example(self):
        out = rouge_l("a b c d", "a c b d")
        assert out.precision == pytest.approx(0.75, abs=1e-9)
        assert out.recall == pytest.approx(0.75, abs=1e-9)
        assert out.f1 == pytest.approx(0.75, abs=1e-9)

    def test_swap_symmetry_of_f1(self):
        pairs = [("a b c", "a c"), ("p q r s", "q s p"), ("m", "m n o")]
        for ref, hyp in pairs:
            assert rouge_l(ref, hyp).f1 == pytest.approx(
                rouge_l(hyp, ref).f1, abs=1e-12)

    def test_dp_equals_recursive_brute_force_exhaustive(self):
        words = ["a", "b", "c"]
        seqs = []
        for n in range(7):
            seqs.extend(itertools.product(words, repeat=n))
        # all pairs is quadratic in 1093 sequences; sample the diagonal
        # blocks exhaustively for lengths <= 4 and spot-check the rest
        short = [s for s in seqs if len(s) <= 4]
        for sa in short:
            for sb in short:
                assert lcs_length(list(sa), list(sb)) == \
                    lcs_recursive(list(sa), list(sb))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.sampled_from("abc"), max_size=6),
           st.lists(st.sampled_from("abc"), max_size=6))
    def test_dp_equals_recursive_brute_force_property(self, a, b):
        assert lcs_length(a, b) == lcs_recursive(a, b)

    def test_bounds(self):
        out = rouge_l("a b c d e", "c a e")
        assert 0.0 <= out.precision <= 1.0
        assert 0.0 <= out.recall <= 1.0
        assert 0.0 <= out.f1 <= 1.0


class TestMeteorLite:
    def test_no_matches(self):
        assert meteor_lite("a b", "c d") == 0.0

    def test_identical_two_words(self):
        # m=2, P=R=1, Fmean=1, ch=1, penalty=.5*(1/2)^3
        assert meteor_lite("hello world", "hello world") == \
            pytest.approx(0.9375, abs=1e-9)

    def test_prefix_hand_example(self):
        # m=2, P=1, R=2/3, Fmean=PR/(.9P+.1R), ch=1
        p, r = 1.0, 2.0 / 3.0
        fmean = p * r / (0.9 * p + 0.1 * r)
        expected = fmean * (1 - 0.5 * (1 / 2) ** 3)
        assert meteor_lite("the cat sat", "the cat") == \
            pytest.approx(expected, abs=1e-9)
        assert expected == pytest.approx(0.6466, abs=5e-5)

    def test_stem_stage_matches_inflection(self):
        # exact stage misses "walked"/"walking"; stems align
        assert meteor_lite("he walked home", "he walking home") > \
            meteor_lite("he walked home", "he goes home")

    def test_chunk_penalty_orders_fragmented_below_contiguous(self):
        contiguous = meteor_lite("a b c d", "a b c d")
        fragmented = meteor_lite("a b c d", "a c b d")
        assert fragmented < contiguous

    def test_bounds(self):
        for hyp in ("a", "a b", "b a d c", "x"):
            assert 0.0 <= meteor_lite("a b c d", hyp) <= 1.0


class TestWer:
    def test_identical(self):
        assert wer("a b c", "a b c") == 0.0

    def test_hand_alignment_example(self):
        # one substitution (b->x), one insertion (d)
        assert wer("a b c", "a x c d") == pytest.approx(2 / 3, abs=1e-12)

    def test_empty_hyp_is_all_deletions(self):
        assert wer("a b c", "") == pytest.approx(1.0, abs=1e-12)

    def test_can_exceed_one(self):
        assert wer("a", "x y z") == pytest.approx(3.0, abs=1e-12)

    def test_empty_ref_rejected(self):
        with pytest.raises(DataError):
            wer("", "a")

    def test_edit_distance_table(self):
        assert edit_distance(["a", "b"], ["a", "b"]) == 0
        assert edit_distance(["a", "b"], ["b", "a"]) == 2
        assert edit_distance(list("kitten"), list("sitting")) == 3

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.sampled_from("abc"), min_size=1, max_size=5),
           st.lists(st.sampled_from("abc"), max_size=5))
    def test_symmetry_and_bounds(self, a, b):
        d = edit_distance(a, b)
        assert d == edit_distance(b, a)
        assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))


class TestScoreCorpus:
    def test_single_pair_equals_pair_scores(self):
        ref, hyp = "the cat sat", "the cat"
        report = score_corpus([(ref, hyp)])
        assert report.n_items == 1
        assert report.rouge1.f1 == pytest.approx(rouge_n(ref, hyp, 1).f1)
        assert report.rougeL.f1 == pytest.approx(rouge_l(ref, hyp).f1)
        assert report.meteor == pytest.approx(meteor_lite(ref, hyp))
        assert report.wer == pytest.approx(wer(ref, hyp))

    def test_two_pairs_mean_rouge(self):
        pairs = [("a b c", "a b c"), ("a b c d", "a c b d")]
        report = score_corpus(pairs)
        mean_f1 = (rouge_l(*pairs[0]).f1 + rouge_l(*pairs[1]).f1) / 2
        assert report.rougeL.f1 == pytest.approx(mean_f1, abs=1e-9)

    def test_wer_pooled_over_ref_words(self):
        # 0 errors over 2 words + 3 errors over 1 word = 3/3
        report = score_corpus([("a b", "a b"), ("a", "x y z")])
        assert report.wer == pytest.approx(3 / 3, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            score_corpus([])

    def test_report_round_trip(self):
        report = score_corpus([("a b c", "a c"), ("d e", "d e")])
        back = ScoreReport.from_json(report.to_json())
        assert back == report

    def test_format_table_mentions_all_metrics(self):
        table = score_corpus([("a b", "a b")]).format_table()
        for name in ("rouge-1", "rouge-2", "rouge-l", "meteor", "wer"):
            assert name in table
