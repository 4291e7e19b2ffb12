"""Counter-based 64-bit randomness utilities.

Every stochastic routine in the package derives its randomness from a user
seed through the SplitMix64 finalizer below.  Streams are addressed rather
than stateful: a (key, counter) pair always yields the same 64-bit word, so
work can be reordered or parallelized without changing any decision sequence.

The same formulas are re-implemented inside the numba kernels
(:mod:`dualgraph._kernels`); ``tests/test_rng.py`` pins the two
implementations against each other.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a high-quality 64-bit bijective mixer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(seed: int, index: int) -> int:
    """Derive an independent child seed from (seed, index)."""
    return mix64((seed & MASK64) ^ mix64((index + GAMMA) & MASK64))


def stream_u64(key: int, counter: int) -> int:
    """Word ``counter`` of the counter-based stream addressed by ``key``."""
    return mix64((key + counter * GAMMA) & MASK64)


def u64_to_unit(u: int) -> float:
    """Map a 64-bit word to a double in the open interval (0, 1).

    52 mantissa bits keep both endpoints representable and strictly inside.
    """
    return ((u >> 12) + 0.5) * (2.0 ** -52)


def trial_seed(seed: int, trial: int) -> int:
    """Seed for the Bernoulli oracle of trial ``trial`` of an estimation run."""
    return child_seed(seed, 2 * trial)


def trial_exp_key(seed: int, trial: int) -> int:
    """Stream key for trial ``trial``'s exponential deviate (GBAS accumulator)."""
    return child_seed(seed, 2 * trial + 1)
