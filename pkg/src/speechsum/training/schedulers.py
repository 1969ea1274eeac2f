"""Learning-rate schedules.

noam_lr is normalized so the configured lr is the exact peak, attained
at step == warmup. plateau_lr replays a validation-metric trace and
multiplies the lr by `factor` each time patience+1 consecutive epochs
fail to improve the best value seen so far.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..errors import ConfigurationError, RangeError


def noam_lr(step: int, peak_lr: float, warmup: int) -> float:
    if step < 1:
        raise RangeError(f"step must be >= 1, got {step}")
    if warmup < 1:
        raise ConfigurationError(f"warmup must be >= 1, got {warmup}")
    if peak_lr <= 0:
        raise ConfigurationError(f"peak_lr must be > 0, got {peak_lr}")
    return peak_lr * min(step / warmup, math.sqrt(warmup / step))


def plateau_lr(history: Sequence[float], initial_lr: float, factor: float,
               patience: int = 0) -> float:
    """lr after replaying the whole metric history (higher is better)."""
    if not 0.0 < factor < 1.0:
        raise ConfigurationError(f"factor must be in (0,1), got {factor}")
    if patience < 0:
        raise ConfigurationError(f"patience must be >= 0, got {patience}")
    if initial_lr <= 0:
        raise ConfigurationError(f"initial_lr must be > 0, got {initial_lr}")
    lr = initial_lr
    best = -math.inf
    bad = 0
    for value in history:
        if value > best:
            best = value
            bad = 0
            continue
        bad += 1
        if bad >= patience + 1:
            lr *= factor
            bad = 0
    return lr
