"""Autoregressive beam-search inference over an encoded utterance.

Hypotheses accumulate summed token log-probabilities; ones that emit
eos retire to a finished pool and the beam shrinks. sos and pad are
banned from expansion, so emitted sequences never contain sos after
position 0 nor any token after eos.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from ..corpus.bpe import EOS_ID, PAD_ID, SOS_ID
from ..errors import ConfigurationError, RangeError
from ..model.network import SpeechSumModel

ASR_BEAM_WIDTH = 16
SUMMARY_BEAM_WIDTH = 4


@dataclass(frozen=True)
class Hypothesis:
    """A (possibly partial) decoded sequence starting with sos."""

    tokens: tuple[int, ...]
    log_prob: float
    finished: bool

    def emitted(self) -> tuple[int, ...]:
        return self.tokens[1:]


@dataclass
class BeamResult:
    best: Hypothesis
    n_best: list[Hypothesis]


def _score(hyp: Hypothesis, length_normalize: bool) -> float:
    if length_normalize and len(hyp.tokens) > 1:
        return hyp.log_prob / (len(hyp.tokens) - 1)
    return hyp.log_prob


def _sort_key(hyp: Hypothesis, length_normalize: bool):
    return (-_score(hyp, length_normalize), hyp.tokens)


def beam_search(model: SpeechSumModel, memory: torch.Tensor,
                memory_mask: torch.Tensor, beam_width: int, max_len: int,
                length_normalize: bool = False) -> BeamResult:
    """Decode one utterance; max_len bounds tokens emitted after sos.

    memory is (L, d) or (1, L, d) encoder output for a single utterance.
    """
    if beam_width < 1:
        raise ConfigurationError(f"beam_width must be >= 1, got {beam_width}")
    if max_len < 1:
        raise ConfigurationError(f"max_len must be >= 1, got {max_len}")
    if max_len > model.config.max_target_len:
        raise RangeError(
            f"max_len {max_len} exceeds max_target_len "
            f"{model.config.max_target_len}")
    if memory.dim() == 2:
        memory = memory.unsqueeze(0)
        memory_mask = memory_mask.unsqueeze(0)

    was_training = model.training
    model.eval()
    try:
        with torch.no_grad():
            return _search(model, memory, memory_mask, beam_width, max_len,
                           length_normalize)
    finally:
        model.train(was_training)


def _search(model: SpeechSumModel, memory: torch.Tensor,
            memory_mask: torch.Tensor, beam_width: int, max_len: int,
            length_normalize: bool) -> BeamResult:
    device = memory.device
    live = [Hypothesis(tokens=(SOS_ID,), log_prob=0.0, finished=False)]
    finished: list[Hypothesis] = []

    for _ in range(max_len):
        if not live:
            break
        prefix = torch.tensor([h.tokens for h in live], dtype=torch.long,
                              device=device)
        token_mask = torch.ones_like(prefix, dtype=torch.bool)
        n_live = prefix.size(0)
        logits = model.decoder(prefix, token_mask,
                               memory.expand(n_live, -1, -1),
                               memory_mask.expand(n_live, -1))
        logp = F.log_softmax(logits[:, -1], dim=-1)
        logp[:, SOS_ID] = float("-inf")
        logp[:, PAD_ID] = float("-inf")

        # all live hypotheses share one length, so normalization cannot
        # reorder a step; it only affects the final pool comparison
        totals = torch.tensor([h.log_prob for h in live],
                              device=device).unsqueeze(1) + logp
        # stable descending sort keeps row-major order on ties: lower
        # parent rank first, then smaller token id
        order = torch.argsort(totals.view(-1), descending=True, stable=True)
        vocab = logp.size(1)
        kept = []
        for flat in order[:beam_width].tolist():
            row, token = divmod(flat, vocab)
            kept.append(Hypothesis(tokens=live[row].tokens + (token,),
                                   log_prob=float(totals[row, token]),
                                   finished=token == EOS_ID))
        live = [h for h in kept if not h.finished]
        finished.extend(h for h in kept if h.finished)

    pool = finished if finished else live
    pool = sorted(pool, key=lambda h: _sort_key(h, length_normalize))
    return BeamResult(best=pool[0], n_best=pool[:beam_width])
