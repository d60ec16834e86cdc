"""
Seed derivation for every random stream in ATOMS Lab.

Each stream is a numpy ``PCG64`` generator whose 64-bit seed is obtained by
folding integer keys into the user seed with the splitmix64 finalizer:

    h = splitmix64(seed)
    for key in keys: h = splitmix64(h XOR key)

so that, e.g., the split of period j depends only on (seed, j) and stays the
same when the panel is truncated.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# Stream tags keep independent consumers of the same (seed, t) apart.
SPLIT_STREAM = 0x5B17
PIVOT_STREAM = 0xA70B
FOLD_STREAM = 0xCF01
ENV_STREAM = 0xE4F1
RISK_STREAM = 0x215C
FOREST_STREAM = 0xF0E5


def splitmix64(x: int) -> int:
    """One splitmix64 step: advance by the golden gamma, then mix."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    h = splitmix64(seed & MASK64)
    for key in keys:
        h = splitmix64(h ^ (key & MASK64))
    return h


def substream(seed: int, *keys: int) -> np.random.Generator:
    """PCG64 generator seeded by ``derive_seed(seed, *keys)``."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *keys)))
