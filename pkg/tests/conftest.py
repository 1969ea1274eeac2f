"""Shared fixtures.

Torch runs single-threaded everywhere so numerical results are
reproducible run to run; tests that train models rely on this.
"""

import numpy as np
import pytest
import torch

from speechsum.corpus.toygen import ToyCorpusSpec, generate_toy_corpus

torch.set_num_threads(1)


TINY_SPEC = dict(seed=11, n_train=40, n_valid=8, n_eval=8, n_external=12,
                 n_planted_dups=3, n_oov_eval=3, noise_sigma=0.05,
                 n_content_words=12, content_len=4, feat_dim=8)


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """A small generated corpus shared by read-only tests."""
    root = tmp_path_factory.mktemp("tiny_corpus")
    return generate_toy_corpus(ToyCorpusSpec(**TINY_SPEC), root)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
