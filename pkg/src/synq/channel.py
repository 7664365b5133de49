"""Binary symmetric channel with counter-based per-frame random streams.

Frame i of a run draws from Philox keyed by (seed, i), so any subset of
frames can be generated in any order -- serial and parallel simulation see
identical noise.  The all-zero codeword is transmitted throughout, so the
received word equals the error pattern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import bits_to_int


@dataclass(frozen=True)
class BscConfig:
    rho: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"crossover probability {self.rho} outside [0, 1]")


def frame_rng(seed: int, stream_index: int) -> np.random.Generator:
    """Independent generator for one frame, keyed (seed, stream_index)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, stream_index & 0xFFFFFFFFFFFFFFFF],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_error_bits(cfg: BscConfig, n: int, stream_index: int) -> np.ndarray:
    rng = frame_rng(cfg.seed, stream_index)
    return (rng.random(n) < cfg.rho).astype(np.uint8)


def sample_error(cfg: BscConfig, n: int, stream_index: int) -> int:
    """Packed error pattern for one frame."""
    return bits_to_int(sample_error_bits(cfg, n, stream_index))
