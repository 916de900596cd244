"""Seedable SplitMix64 generator.

Implemented from the published recurrence (not imported) so that a given
seed yields the same stream on every platform and in the compiled kernel.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_POW_M53 = 1.0 / (1 << 53)


class RandomSource:
    """Deterministic uniform randomness for one training run.

    A source is single-owner; concurrent runs each build their own.
    """

    __slots__ = ("seed", "_state")

    def __init__(self, seed: int) -> None:
        if not 0 <= seed <= MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self._state = seed

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN_GAMMA) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def unit_float(self) -> float:
        """Uniform float in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * _TWO_POW_M53

    def int_below(self, n: int) -> int:
        """Uniform integer in ``range(n)``.

        Draws below ``2**64 mod n`` are rejected, which leaves a multiple of
        ``n`` accepted values and removes modulo bias.
        """
        if n < 1:
            raise ValueError(f"int_below needs n >= 1, got {n}")
        threshold = ((1 << 64) - n) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n

    def __repr__(self) -> str:
        return f"RandomSource(seed={self.seed})"


def new_source(seed: int) -> RandomSource:
    return RandomSource(seed)
