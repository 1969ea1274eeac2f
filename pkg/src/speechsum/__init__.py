"""End-to-end speech summarization: dual pre-encoder Conformer
encoder-decoder, multi-stage training, phoneme-based augmentation,
beam-search decoding, summarization metrics, and evaluation-leakage
analysis, with a deterministic synthetic corpus for desk-scale runs.
"""

__version__ = "0.1.0"
