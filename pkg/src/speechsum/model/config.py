"""Model hyperparameters and the shipped size presets."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import ConfigurationError

POSITIONAL_MODES = ("learned", "absolute_sinusoidal")
NORM_MODES = ("layer_norm", "batch_norm")


@dataclass
class ModelConfig:
    embed_dim: int = 96
    enc_layers: int = 2
    dec_layers: int = 2
    enc_ff: int = 192
    dec_ff: int = 192
    enc_heads: int = 4
    dec_heads: int = 4
    conv_kernel: int = 7
    subsample_rate: int = 4
    vocab_size: int = 200
    phoneme_inventory: int = 42
    positional_mode: str = "learned"
    norm_mode: str = "layer_norm"
    max_target_len: int = 256
    input_dim: int = 40
    dropout: float = 0.1

    def validate(self) -> None:
        if self.embed_dim < 2 or self.embed_dim % 2 != 0:
            raise ConfigurationError("embed_dim must be a positive even integer")
        for name, heads in (("enc_heads", self.enc_heads), ("dec_heads", self.dec_heads)):
            if heads < 1 or self.embed_dim % heads != 0:
                raise ConfigurationError(
                    f"embed_dim={self.embed_dim} must be divisible by {name}={heads}")
        if self.conv_kernel < 1 or self.conv_kernel % 2 == 0:
            raise ConfigurationError(f"conv_kernel must be odd, got {self.conv_kernel}")
        if self.subsample_rate not in (1, 2, 4):
            raise ConfigurationError(
                f"subsample_rate must be 1, 2, or 4, got {self.subsample_rate}")
        for name in ("enc_layers", "dec_layers", "enc_ff", "dec_ff", "vocab_size",
                     "phoneme_inventory", "max_target_len", "input_dim"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.vocab_size < 4:
            raise ConfigurationError("vocab_size must cover the 4 special tokens")
        if self.positional_mode not in POSITIONAL_MODES:
            raise ConfigurationError(
                f"positional_mode must be one of {POSITIONAL_MODES}")
        if self.norm_mode not in NORM_MODES:
            raise ConfigurationError(f"norm_mode must be one of {NORM_MODES}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigurationError("dropout must lie in [0, 1)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigurationError(f"unknown model config keys: {sorted(unknown)}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg


# Full-scale profiles are shipped as documented references; the toy
# profile is sized for single-core runs on the synthetic corpus.
MODEL_PRESETS: dict[str, dict] = {
    "toy": dict(embed_dim=96, enc_layers=2, dec_layers=2, enc_ff=192, dec_ff=192,
                enc_heads=4, dec_heads=4, conv_kernel=7, subsample_rate=4,
                vocab_size=112, phoneme_inventory=42, positional_mode="learned",
                norm_mode="layer_norm", max_target_len=96, input_dim=40, dropout=0.1),
    "base": dict(embed_dim=512, enc_layers=12, dec_layers=6, enc_ff=2048, dec_ff=2048,
                 enc_heads=8, dec_heads=4, conv_kernel=31, subsample_rate=4,
                 vocab_size=1000, phoneme_inventory=42, positional_mode="learned",
                 norm_mode="layer_norm", max_target_len=256, input_dim=43, dropout=0.1),
    "large": dict(embed_dim=768, enc_layers=12, dec_layers=6, enc_ff=2048, dec_ff=3072,
                  enc_heads=8, dec_heads=12, conv_kernel=31, subsample_rate=4,
                  vocab_size=1000, phoneme_inventory=42, positional_mode="learned",
                  norm_mode="layer_norm", max_target_len=256, input_dim=43, dropout=0.1),
}

# tiny profile used by the finite-difference gradient suite
TINY_GRADCHECK = dict(embed_dim=8, enc_layers=1, dec_layers=1, enc_ff=16, dec_ff=16,
                      enc_heads=2, dec_heads=2, conv_kernel=3, subsample_rate=4,
                      vocab_size=11, phoneme_inventory=42, positional_mode="learned",
                      norm_mode="layer_norm", max_target_len=16, input_dim=6,
                      dropout=0.0)


def model_preset(name: str) -> ModelConfig:
    if name not in MODEL_PRESETS:
        raise ConfigurationError(
            f"unknown model preset {name!r}; choose from {sorted(MODEL_PRESETS)}")
    return ModelConfig.from_dict(dict(MODEL_PRESETS[name]))
