"""Self-contained xorshift64* generator for reproducible synthetic data.

The algorithm is spelled out here rather than delegated to a platform
RNG so fixtures can be regenerated bit-for-bit anywhere: state update
``x ^= x >> 12; x ^= x << 25; x ^= x >> 27`` followed by multiplication
with 0x2545F4914F6CDD1D, all modulo 2^64.  Seeding runs the raw seed
through one splitmix64 scramble so small seeds still produce
well-mixed streams.
"""

from __future__ import annotations

import math

__all__ = ["XorShift64Star"]

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        state = _splitmix64(seed & _MASK)
        self._state = state if state != 0 else 0x9E3779B97F4A7C15
        self._spare_normal: float | None = None

    def next_uint64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & _MASK
        x ^= x >> 27
        self._state = x
        return (x * _MULT) & _MASK

    def uniform(self) -> float:
        """Uniform draw on (0, 1] with 53-bit resolution."""
        return ((self.next_uint64() >> 11) + 1) * 2.0 ** -53

    def normal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        """Gaussian draw via the plain Box-Muller transform (pair cached)."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
        else:
            u1 = self.uniform()
            u2 = self.uniform()
            radius = math.sqrt(-2.0 * math.log(u1))
            angle = 2.0 * math.pi * u2
            z = radius * math.cos(angle)
            self._spare_normal = radius * math.sin(angle)
        return mean + sd * z

    def lognormal(self, mean: float = 0.0, sd: float = 1.0) -> float:
        return math.exp(self.normal(mean, sd))

    def randrange(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection of the top remainder."""
        if n <= 0:
            raise ValueError("n must be positive")
        threshold = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_uint64()
            if x < threshold:
                return x % n

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), partial Fisher-Yates."""
        if k > population:
            raise ValueError("sample larger than population")
        pool = list(range(population))
        for i in range(k):
            j = i + self.randrange(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
