"""Dual pre-encoder Conformer encoder-decoder.

Speech input passes a 2-D convolutional pre-encoder; phoneme-id input
passes a 3-layer BLSTM pre-encoder with layer norm and subsampling
convolutions. Both emit frames at 1/4 rate into the same Conformer
encoder (macaron blocks, relative-position self-attention, and layer
norm in place of batch norm inside the convolution module) and the
same Transformer decoder (learnable positional embeddings by default).

Masking discipline: padded positions are zeroed after every submodule,
so batch padding never changes the unmasked outputs and a single
utterance encodes identically alone or inside any batch (layer_norm
mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import DataError, RangeError, ShapeError
from .config import ModelConfig


def mask_out(x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    """Zero time steps where mask is False; x is (B, T, d), mask (B, T)."""
    return x * mask.unsqueeze(-1).to(x.dtype)


def lengths_to_mask(lengths: torch.Tensor, max_len: int) -> torch.Tensor:
    steps = torch.arange(max_len, device=lengths.device)
    return steps.unsqueeze(0) < lengths.unsqueeze(1)


def _subsampled_length(lengths: torch.Tensor, stride: int) -> torch.Tensor:
    # conv with kernel 3, padding 1: out = floor((T - 1)/stride) + 1
    return (lengths - 1) // stride + 1


def _strides_for_rate(rate: int, n_layers: int) -> list[int]:
    n_two = {1: 0, 2: 1, 4: 2}[rate]
    strides = [1] * n_layers
    if n_two:
        gap = max(1, n_layers // n_two)
        for i in range(n_two):
            strides[i * gap] = 2
    return strides


class SpeechPreEncoder(nn.Module):
    """4-layer 2-D CNN stack subsampling time (and frequency) by the
    configured rate, then a linear projection to the model dimension."""

    CHANNELS = (32, 32, 64, 64)

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.strides = _strides_for_rate(config.subsample_rate, len(self.CHANNELS))
        convs = []
        in_ch = 1
        for out_ch, stride in zip(self.CHANNELS, self.strides):
            convs.append(nn.Conv2d(in_ch, out_ch, kernel_size=3,
                                   stride=(stride, stride), padding=1))
            in_ch = out_ch
        self.convs = nn.ModuleList(convs)
        freq = config.input_dim
        for stride in self.strides:
            freq = (freq - 1) // stride + 1
        self.out_freq = freq
        self.proj = nn.Linear(self.CHANNELS[-1] * freq, config.embed_dim)

    def forward(self, feats: torch.Tensor, lengths: torch.Tensor):
        if feats.dim() != 3:
            raise ShapeError(f"speech features must be (B, T, F), got {tuple(feats.shape)}")
        if feats.size(1) == 0:
            raise ShapeError("speech input has zero frames")
        if feats.size(2) != self.config.input_dim:
            raise ShapeError(
                f"feature dim {feats.size(2)} != configured {self.config.input_dim}")
        x = feats.unsqueeze(1)  # (B, 1, T, F)
        cur = lengths
        x = x * lengths_to_mask(cur, x.size(2)).unsqueeze(1).unsqueeze(-1).to(x.dtype)
        for conv, stride in zip(self.convs, self.strides):
            # silu keeps the loss smooth so finite-difference checks converge
            x = F.silu(conv(x))
            cur = _subsampled_length(cur, stride)
            x = x * lengths_to_mask(cur, x.size(2)).unsqueeze(1).unsqueeze(-1).to(x.dtype)
        b, ch, t, freq = x.shape
        x = x.transpose(1, 2).reshape(b, t, ch * freq)
        mask = lengths_to_mask(cur, t)
        return mask_out(self.proj(x), mask), mask


class PhonemePreEncoder(nn.Module):
    """Embedding -> 3-layer BLSTM -> layer norm -> subsampling convs."""

    N_LSTM_LAYERS = 3

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.embed_dim
        self.embed = nn.Embedding(config.phoneme_inventory, d)
        self.blstm = nn.LSTM(d, d // 2, num_layers=self.N_LSTM_LAYERS,
                             bidirectional=True, batch_first=True)
        self.norm = nn.LayerNorm(d)
        self.strides = _strides_for_rate(config.subsample_rate, 2)
        self.convs = nn.ModuleList(
            [nn.Conv1d(d, d, kernel_size=3, stride=s, padding=1) for s in self.strides])

    def forward(self, ids: torch.Tensor, lengths: torch.Tensor):
        if ids.dim() != 2:
            raise ShapeError(f"phoneme ids must be (B, T), got {tuple(ids.shape)}")
        if int(ids.max()) >= self.config.phoneme_inventory or int(ids.min()) < 0:
            raise RangeError(
                f"phoneme id outside inventory of size {self.config.phoneme_inventory}")
        mask = lengths_to_mask(lengths, ids.size(1))
        x = mask_out(self.embed(ids), mask)
        packed = nn.utils.rnn.pack_padded_sequence(
            x, lengths.cpu(), batch_first=True, enforce_sorted=False)
        out, _ = self.blstm(packed)
        x, _ = nn.utils.rnn.pad_packed_sequence(
            out, batch_first=True, total_length=ids.size(1))
        x = mask_out(self.norm(x), mask)
        cur = lengths
        for conv, stride in zip(self.convs, self.strides):
            x = F.silu(conv(x.transpose(1, 2))).transpose(1, 2)
            cur = _subsampled_length(cur, stride)
            mask = lengths_to_mask(cur, x.size(1))
            x = mask_out(x, mask)
        return x, mask


def relative_sinusoid(length: int, dim: int, dtype: torch.dtype,
                      device: torch.device) -> torch.Tensor:
    """Sinusoidal table for relative offsets length-1 ... -(length-1)."""
    pos = torch.arange(length - 1, -length, -1, dtype=dtype, device=device)
    inv = torch.exp(torch.arange(0, dim, 2, dtype=dtype, device=device)
                    * (-math.log(10000.0) / dim))
    table = torch.zeros(2 * length - 1, dim, dtype=dtype, device=device)
    table[:, 0::2] = torch.sin(pos.unsqueeze(1) * inv)
    table[:, 1::2] = torch.cos(pos.unsqueeze(1) * inv)
    return table


def absolute_sinusoid(length: int, dim: int, dtype: torch.dtype,
                      device: torch.device) -> torch.Tensor:
    pos = torch.arange(length, dtype=dtype, device=device)
    inv = torch.exp(torch.arange(0, dim, 2, dtype=dtype, device=device)
                    * (-math.log(10000.0) / dim))
    table = torch.zeros(length, dim, dtype=dtype, device=device)
    table[:, 0::2] = torch.sin(pos.unsqueeze(1) * inv)
    table[:, 1::2] = torch.cos(pos.unsqueeze(1) * inv)
    return table


def _neg_fill(dtype: torch.dtype) -> float:
    return torch.finfo(dtype).min / 2


class RelPositionAttention(nn.Module):
    """Multi-head self-attention with Transformer-XL relative positions:
    scores combine content-content and content-position terms with the
    learned biases u and v and a projected sinusoidal offset table."""

    def __init__(self, dim: int, heads: int, dropout: float):
        super().__init__()
        self.heads = heads
        self.d_head = dim // heads
        self.q = nn.Linear(dim, dim)
        self.k = nn.Linear(dim, dim)
        self.v = nn.Linear(dim, dim)
        self.out = nn.Linear(dim, dim)
        self.pos = nn.Linear(dim, dim, bias=False)
        self.pos_bias_u = nn.Parameter(torch.zeros(heads, self.d_head))
        self.pos_bias_v = nn.Parameter(torch.zeros(heads, self.d_head))
        self.drop = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor, mask: torch.Tensor,
                pos_table: torch.Tensor) -> torch.Tensor:
        b, t, _ = x.shape
        h, dh = self.heads, self.d_head
        q = self.q(x).view(b, t, h, dh).transpose(1, 2)
        k = self.k(x).view(b, t, h, dh).transpose(1, 2)
        v = self.v(x).view(b, t, h, dh).transpose(1, 2)
        p = self.pos(pos_table).view(2 * t - 1, h, dh).permute(1, 0, 2)  # (H, 2T-1, dh)

        content = torch.matmul(q + self.pos_bias_u.unsqueeze(1), k.transpose(-2, -1))
        pos_scores = torch.matmul(q + self.pos_bias_v.unsqueeze(1),
                                  p.unsqueeze(0).transpose(-2, -1))  # (B,H,T,2T-1)
        # select offset (t-1) + (j - i) for each query i, key j
        arange = torch.arange(t, device=x.device)
        index = (t - 1) + arange.unsqueeze(0) - arange.unsqueeze(1)
        index = index.unsqueeze(0).unsqueeze(0).expand(b, h, t, t)
        pos_scores = pos_scores.gather(-1, index)

        scores = (content + pos_scores) / math.sqrt(dh)
        scores = scores.masked_fill(~mask.unsqueeze(1).unsqueeze(2), _neg_fill(x.dtype))
        attn = self.drop(torch.softmax(scores, dim=-1))
        out = torch.matmul(attn, v).transpose(1, 2).reshape(b, t, h * dh)
        return mask_out(self.out(out), mask)


class MultiHeadAttention(nn.Module):
    def __init__(self, dim: int, heads: int, dropout: float):
        super().__init__()
        self.heads = heads
        self.d_head = dim // heads
        self.q = nn.Linear(dim, dim)
        self.k = nn.Linear(dim, dim)
        self.v = nn.Linear(dim, dim)
        self.out = nn.Linear(dim, dim)
        self.drop = nn.Dropout(dropout)

    def forward(self, query: torch.Tensor, memory: torch.Tensor,
                attn_mask: torch.Tensor) -> torch.Tensor:
        """attn_mask: (B, Lq, Lk) True where attention is allowed."""
        b, lq, _ = query.shape
        lk = memory.size(1)
        h, dh = self.heads, self.d_head
        q = self.q(query).view(b, lq, h, dh).transpose(1, 2)
        k = self.k(memory).view(b, lk, h, dh).transpose(1, 2)
        v = self.v(memory).view(b, lk, h, dh).transpose(1, 2)
        scores = torch.matmul(q, k.transpose(-2, -1)) / math.sqrt(dh)
        scores = scores.masked_fill(~attn_mask.unsqueeze(1), _neg_fill(query.dtype))
        attn = self.drop(torch.softmax(scores, dim=-1))
        out = torch.matmul(attn, v).transpose(1, 2).reshape(b, lq, h * dh)
        return self.out(out)


class MaskedBatchNorm(nn.Module):
    """Per-batch normalization over valid positions (no running stats)."""

    def __init__(self, dim: int, eps: float = 1e-5):
        super().__init__()
        self.weight = nn.Parameter(torch.ones(dim))
        self.bias = nn.Parameter(torch.zeros(dim))
        self.eps = eps

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        valid = mask.unsqueeze(-1).to(x.dtype)
        count = valid.sum()
        if count < 1:
            raise DataError("batch norm over an empty batch")
        mean = (x * valid).sum(dim=(0, 1)) / count
        var = (((x - mean) ** 2) * valid).sum(dim=(0, 1)) / count
        return (x - mean) / torch.sqrt(var + self.eps) * self.weight + self.bias


class FeedForward(nn.Module):
    def __init__(self, dim: int, hidden: int, dropout: float):
        super().__init__()
        self.norm = nn.LayerNorm(dim)
        self.w1 = nn.Linear(dim, hidden)
        self.w2 = nn.Linear(hidden, dim)
        self.drop = nn.Dropout(dropout)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        y = F.silu(self.w1(self.norm(x)))
        return self.drop(self.w2(self.drop(y)))


class ConformerConvModule(nn.Module):
    """Pointwise + GLU, depthwise, norm (LN by default, per-batch BN for
    the ablation), SiLU, pointwise."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        d = config.embed_dim
        self.norm_in = nn.LayerNorm(d)
        self.pw1 = nn.Conv1d(d, 2 * d, kernel_size=1)
        self.depthwise = nn.Conv1d(d, d, kernel_size=config.conv_kernel,
                                   padding=(config.conv_kernel - 1) // 2, groups=d)
        self.batch_mode = config.norm_mode == "batch_norm"
        self.norm_mid: nn.Module
        if self.batch_mode:
            self.norm_mid = MaskedBatchNorm(d)
        else:
            self.norm_mid = nn.LayerNorm(d)
        self.pw2 = nn.Conv1d(d, d, kernel_size=1)
        self.drop = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        y = mask_out(self.norm_in(x), mask)
        y = F.glu(self.pw1(y.transpose(1, 2)), dim=1)
        y = y * mask.unsqueeze(1).to(y.dtype)
        y = self.depthwise(y).transpose(1, 2)
        y = mask_out(y, mask)
        y = self.norm_mid(y, mask) if self.batch_mode else self.norm_mid(y)
        y = F.silu(y)
        y = self.pw2(y.transpose(1, 2)).transpose(1, 2)
        return self.drop(y)


class ConformerBlock(nn.Module):
    """Macaron block: half FF, relative-position MHSA, conv module,
    half FF, final layer norm."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        d = config.embed_dim
        self.ff1 = FeedForward(d, config.enc_ff, config.dropout)
        self.attn_norm = nn.LayerNorm(d)
        self.attn = RelPositionAttention(d, config.enc_heads, config.dropout)
        self.conv = ConformerConvModule(config)
        self.ff2 = FeedForward(d, config.enc_ff, config.dropout)
        self.final_norm = nn.LayerNorm(d)
        self.drop = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor, mask: torch.Tensor,
                pos_table: torch.Tensor) -> torch.Tensor:
        x = x + 0.5 * mask_out(self.ff1(x), mask)
        x = x + mask_out(self.drop(self.attn(self.attn_norm(x), mask, pos_table)), mask)
        x = x + mask_out(self.conv(x, mask), mask)
        x = x + 0.5 * mask_out(self.ff2(x), mask)
        return mask_out(self.final_norm(x), mask)


class ConformerEncoder(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        self.blocks = nn.ModuleList(
            [ConformerBlock(config) for _ in range(config.enc_layers)])

    def forward(self, x: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        pos_table = relative_sinusoid(x.size(1), self.config.embed_dim,
                                      x.dtype, x.device)
        for block in self.blocks:
            x = block(x, mask, pos_table)
        return x


class DecoderBlock(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        d = config.embed_dim
        self.self_norm = nn.LayerNorm(d)
        self.self_attn = MultiHeadAttention(d, config.dec_heads, config.dropout)
        self.cross_norm = nn.LayerNorm(d)
        self.cross_attn = MultiHeadAttention(d, config.dec_heads, config.dropout)
        self.ff = FeedForward(d, config.dec_ff, config.dropout)
        self.drop = nn.Dropout(config.dropout)

    def forward(self, x: torch.Tensor, self_mask: torch.Tensor,
                memory: torch.Tensor, memory_mask: torch.Tensor) -> torch.Tensor:
        normed = self.self_norm(x)
        x = x + self.drop(self.self_attn(normed, normed, self_mask))
        cross = self.cross_attn(self.cross_norm(x), memory,
                                memory_mask.unsqueeze(1).expand(-1, x.size(1), -1))
        x = x + self.drop(cross)
        return x + self.ff(x)


class TransformerDecoder(nn.Module):
    """Pre-norm Transformer decoder; token embeddings are scaled by
    sqrt(d) and combined with learnable (default) or fixed sinusoidal
    positional embeddings."""

    def __init__(self, config: ModelConfig):
        super().__init__()
        self.config = config
        d = config.embed_dim
        self.embed = nn.Embedding(config.vocab_size, d)
        if config.positional_mode == "learned":
            self.lpe = nn.Embedding(config.max_target_len, d)
        else:
            self.lpe = None
        self.blocks = nn.ModuleList(
            [DecoderBlock(config) for _ in range(config.dec_layers)])
        self.final_norm = nn.LayerNorm(d)
        self.out_proj = nn.Linear(d, config.vocab_size)
        self.drop = nn.Dropout(config.dropout)

    def positional(self, length: int, dtype: torch.dtype,
                   device: torch.device) -> torch.Tensor:
        if length > self.config.max_target_len:
            raise RangeError(
                f"target length {length} exceeds max_target_len "
                f"{self.config.max_target_len}")
        if self.lpe is not None:
            return self.lpe(torch.arange(length, device=device))
        return absolute_sinusoid(length, self.config.embed_dim, dtype, device)

    def hidden_states(self, tokens: torch.Tensor, token_mask: torch.Tensor,
                      memory: torch.Tensor, memory_mask: torch.Tensor) -> torch.Tensor:
        b, length = tokens.shape
        x = self.embed(tokens) * math.sqrt(self.config.embed_dim)
        x = x + self.positional(length, x.dtype, tokens.device).unsqueeze(0)
        x = self.drop(x)
        causal = torch.tril(torch.ones(length, length, dtype=torch.bool,
                                       device=tokens.device))
        self_mask = causal.unsqueeze(0) & token_mask.unsqueeze(1)
        for block in self.blocks:
            x = block(x, self_mask, memory, memory_mask)
        return self.final_norm(x)

    def forward(self, tokens: torch.Tensor, token_mask: torch.Tensor,
                memory: torch.Tensor, memory_mask: torch.Tensor) -> torch.Tensor:
        return self.out_proj(self.hidden_states(tokens, token_mask, memory, memory_mask))


@dataclass
class ModelBatch:
    """One training batch; exactly one input modality is populated.

    targets hold sos + tokens + eos rows, right-padded with the pad id.
    """
    modality: str
    input_lengths: torch.Tensor
    targets: torch.Tensor
    features: torch.Tensor | None = None
    phoneme_ids: torch.Tensor | None = None
    pad_id: int = 3


@dataclass
class DecoderStepOutput:
    hidden: torch.Tensor
    distribution: torch.Tensor


class SpeechSumModel(nn.Module):
    def __init__(self, config: ModelConfig):
        super().__init__()
        config.validate()
        self.config = config
        self.speech_preencoder = SpeechPreEncoder(config)
        self.phoneme_preencoder = PhonemePreEncoder(config)
        self.encoder = ConformerEncoder(config)
        self.decoder = TransformerDecoder(config)

    MODULE_GROUPS = ("speech_preencoder", "phoneme_preencoder", "encoder", "decoder")

    def encode_speech(self, feats: torch.Tensor, lengths: torch.Tensor):
        pre, mask = self.speech_preencoder(feats, lengths)
        return self.encoder(pre, mask), mask

    def encode_phonemes(self, ids: torch.Tensor, lengths: torch.Tensor):
        pre, mask = self.phoneme_preencoder(ids, lengths)
        return self.encoder(pre, mask), mask

    def encode_batch(self, batch: ModelBatch):
        if batch.modality == "speech":
            if batch.features is None:
                raise DataError("speech batch lacks features")
            return self.encode_speech(batch.features, batch.input_lengths)
        if batch.modality == "phoneme":
            if batch.phoneme_ids is None:
                raise DataError("phoneme batch lacks ids")
            return self.encode_phonemes(batch.phoneme_ids, batch.input_lengths)
        raise DataError(f"unknown batch modality {batch.modality!r}")

    def forward_loss(self, batch: ModelBatch):
        """Teacher-forced cross-entropy over non-pad target positions.

        Returns (loss, token_accuracy, n_tokens).
        """
        memory, memory_mask = self.encode_batch(batch)
        t_in = batch.targets[:, :-1]
        t_out = batch.targets[:, 1:]
        out_mask = t_out != batch.pad_id
        n_tokens = int(out_mask.sum())
        if n_tokens == 0:
            raise DataError("batch has zero non-pad target positions")
        # pad slots in the input prefix are masked from self-attention
        in_mask = t_in != batch.pad_id
        in_mask[:, 0] = True
        logits = self.decoder(t_in, in_mask, memory, memory_mask)
        logp = F.log_softmax(logits, dim=-1)
        picked = logp.gather(-1, t_out.unsqueeze(-1)).squeeze(-1)
        loss = -(picked * out_mask.to(logp.dtype)).sum() / n_tokens
        correct = (logits.argmax(dim=-1) == t_out) & out_mask
        accuracy = float(correct.sum()) / n_tokens
        return loss, accuracy, n_tokens

    @torch.no_grad()
    def decoder_step(self, prefix: torch.Tensor, memory: torch.Tensor,
                     memory_mask: torch.Tensor) -> DecoderStepOutput:
        """Distribution over the next token after a 1-D sos-led prefix."""
        if prefix.dim() != 1:
            raise ShapeError("decoder_step expects a 1-D token prefix")
        length = prefix.size(0)
        if length > self.config.max_target_len:
            raise RangeError(
                f"prefix length {length} exceeds max_target_len "
                f"{self.config.max_target_len}")
        tokens = prefix.unsqueeze(0)
        token_mask = torch.ones(1, length, dtype=torch.bool, device=prefix.device)
        if memory.dim() == 2:
            memory = memory.unsqueeze(0)
            memory_mask = memory_mask.unsqueeze(0)
        hidden = self.decoder.hidden_states(tokens, token_mask, memory, memory_mask)
        last = hidden[0, -1]
        dist = torch.softmax(self.decoder.out_proj(last), dim=-1)
        return DecoderStepOutput(hidden=last, distribution=dist)


def init_parameters(config: ModelConfig, seed: int) -> SpeechSumModel:
    """Construct and deterministically initialize a model.

    Linear/conv weights: uniform scaled by 1/sqrt(fan_in), zero biases.
    Embeddings: normal with std 1/sqrt(embed_dim). LSTM: fan-in uniform
    for input maps, per-gate orthogonal recurrent maps, zero biases.
    """
    config.validate()
    torch.manual_seed(seed)
    model = SpeechSumModel(config)
    for name, module in model.named_modules():
        if isinstance(module, (nn.Linear, nn.Conv1d, nn.Conv2d)):
            if isinstance(module, nn.Linear):
                fan_in = module.weight.size(1)
            else:
                fan_in = module.in_channels // module.groups
                for k in module.kernel_size:
                    fan_in *= k
            bound = 1.0 / math.sqrt(fan_in)
            nn.init.uniform_(module.weight, -bound, bound)
            if module.bias is not None:
                nn.init.zeros_(module.bias)
        elif isinstance(module, nn.Embedding):
            nn.init.normal_(module.weight, 0.0, 1.0 / math.sqrt(config.embed_dim))
        elif isinstance(module, nn.LayerNorm):
            nn.init.ones_(module.weight)
            nn.init.zeros_(module.bias)
        elif isinstance(module, nn.LSTM):
            hidden = module.hidden_size
            for pname, param in module.named_parameters():
                if pname.startswith("weight_ih"):
                    bound = 1.0 / math.sqrt(param.size(1))
                    nn.init.uniform_(param, -bound, bound)
                elif pname.startswith("weight_hh"):
                    for gate in range(4):
                        nn.init.orthogonal_(param[gate * hidden:(gate + 1) * hidden])
                else:
                    nn.init.zeros_(param)
        elif isinstance(module, RelPositionAttention):
            bound = 1.0 / math.sqrt(module.d_head)
            nn.init.uniform_(module.pos_bias_u, -bound, bound)
            nn.init.uniform_(module.pos_bias_v, -bound, bound)
    return model


def _linear_count(d_in: int, d_out: int, bias: bool = True) -> int:
    return d_in * d_out + (d_out if bias else 0)


def _ff_count(d: int, hidden: int) -> int:
    return 2 * d + _linear_count(d, hidden) + _linear_count(hidden, d)


def parameter_count(config: ModelConfig) -> dict[str, int]:
    """Closed-form parameter counts per module group, plus "total".

    Mirrors the construction exactly; verified against enumeration in
    the test suite.
    """
    d = config.embed_dim
    strides = _strides_for_rate(config.subsample_rate, 4)
    speech = 0
    in_ch = 1
    for out_ch in SpeechPreEncoder.CHANNELS:
        speech += in_ch * out_ch * 9 + out_ch
        in_ch = out_ch
    freq = config.input_dim
    for stride in strides:
        freq = (freq - 1) // stride + 1
    speech += _linear_count(SpeechPreEncoder.CHANNELS[-1] * freq, d)

    h = d // 2
    lstm_layer = 2 * (4 * h * d + 4 * h * h + 8 * h)
    phoneme = (config.phoneme_inventory * d
               + PhonemePreEncoder.N_LSTM_LAYERS * lstm_layer
               + 2 * d
               + 2 * (d * d * 3 + d))

    attn = 2 * d + 4 * _linear_count(d, d) + d * d + 2 * (d // config.enc_heads) * config.enc_heads
    conv = (2 * d                      # input layer norm
            + _linear_count(d, 2 * d)  # pointwise 1 (kernel 1)
            + d * config.conv_kernel + d  # depthwise
            + 2 * d                    # mid norm (LN or BN affine)
            + _linear_count(d, d))     # pointwise 2
    enc_block = 2 * _ff_count(d, config.enc_ff) + attn + conv + 2 * d
    encoder = config.enc_layers * enc_block

    dec_attn = 4 * _linear_count(d, d)
    dec_block = (2 * d + dec_attn) * 2 + _ff_count(d, config.dec_ff)
    decoder = (config.vocab_size * d
               + (config.max_target_len * d if config.positional_mode == "learned" else 0)
               + config.dec_layers * dec_block
               + 2 * d
               + _linear_count(d, config.vocab_size))

    counts = {"speech_preencoder": speech, "phoneme_preencoder": phoneme,
              "encoder": encoder, "decoder": decoder}
    counts["total"] = sum(counts.values())
    return counts
