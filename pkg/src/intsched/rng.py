"""Counter-based coin flips keyed by (seed, trial, interval id).

Each flip is a pure function of its key, so a run never depends on how many
other coins were drawn before it, and a batch of trials evaluated with numpy
reproduces the scalar runs bit for bit. The mixer is the SplitMix64
finalizer.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
BITS = 53


def mix64(z: int) -> int:
    z = (z + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z += np.uint64(_GOLDEN)
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def threshold(p) -> int:
    """Integer cut so that ``draw < threshold(p)`` has probability ~p."""
    q = Fraction(p)
    if not 0 <= q <= 1:
        raise ValueError(f"probability {p!r} outside [0, 1]")
    scaled = q * (1 << BITS)
    return -((-scaled.numerator) // scaled.denominator)


def trial_key(seed: int, trial: int) -> int:
    return mix64(mix64(seed & MASK64) ^ (trial & MASK64))


def draw(seed: int, trial: int, item: int) -> int:
    """53 uniform bits for one coin."""
    return mix64(trial_key(seed, trial) ^ (item & MASK64)) >> (64 - BITS)


def flip(p, seed: int, trial: int, item: int) -> bool:
    return draw(seed, trial, item) < threshold(p)


def trial_keys(seed: int, trials: int) -> np.ndarray:
    t = np.arange(trials, dtype=np.uint64)
    return mix64_array(mix64_array(np.array([seed & MASK64], dtype=np.uint64)) ^ t)


def draws(keys: np.ndarray, item: int) -> np.ndarray:
    return mix64_array(keys ^ np.uint64(item & MASK64)) >> np.uint64(64 - BITS)


def derive_seed(seed: int, *labels: int) -> int:
    """Deterministic child seed, e.g. one per sweep row."""
    z = seed & MASK64
    for label in labels:
        z = mix64(z ^ (label & MASK64))
    return z
