"""Version-pinned pseudo-random streams.

xoshiro256** (Blackman & Vigna) seeded through splitmix64. Independent
streams are derived from one root seed by label, so adding a consumer never
shifts the draws seen by another. The algorithm is fixed here rather than
borrowed from :mod:`random` so that output cannot change with the interpreter
version.
"""

from __future__ import annotations

import hashlib
import math
from typing import Sequence, TypeVar

T = TypeVar("T")

ALGORITHM = "xoshiro256**/splitmix64 v1"
_M64 = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _M64


def splitmix64(state: int) -> tuple[int, int]:
    """Return ``(output, next_state)``."""
    state = (state + 0x9E3779B97F4A7C15) & _M64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31), state


class Xoshiro256:
    __slots__ = ("_s",)

    def __init__(self, seed: int):
        sm = seed & _M64
        s = []
        for _ in range(4):
            out, sm = splitmix64(sm)
            s.append(out)
        if not any(s):
            s[0] = 1
        self._s = s

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & _M64, 7) * 9) & _M64
        t = (s[1] << 17) & _M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range [lo, hi] (rejection sampling, no modulo bias)."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        if span == 1:
            return lo
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def uniform(self, a: float, b: float) -> float:
        return a + (b - a) * self.random()

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def expovariate(self, mean: float) -> float:
        """Exponential draw with the given mean."""
        return -math.log(1.0 - self.random()) * mean

    def gauss(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        # Box-Muller; one draw per call keeps the stream position predictable
        u1 = 1.0 - self.random()
        u2 = self.random()
        return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def choice(self, items: Sequence[T]) -> T:
        if not items:
            raise IndexError("choice from empty sequence")
        return items[self.randint(0, len(items) - 1)]

    def weighted_choice(self, items: Sequence[T], weights: Sequence[float]) -> T:
        total = math.fsum(weights)
        x = self.random() * total
        acc = 0.0
        for item, w in zip(items, weights):
            acc += w
            if x < acc:
                return item
        return items[-1]

    def sample(self, items: Sequence[T], k: int) -> list[T]:
        pool = list(items)
        out = []
        for _ in range(min(k, len(pool))):
            out.append(pool.pop(self.randint(0, len(pool) - 1)))
        return out


def derive_seed(root_seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{root_seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


class RngStreams:
    """Named, independent generators derived from one root seed."""

    LABELS = ("orders", "quality", "inspection", "disruptions", "durations", "lifecycle", "materials", "changes",
              "seeds")

    def __init__(self, seed: int):
        self.seed = seed
        self._streams: dict[str, Xoshiro256] = {}

    def __getitem__(self, label: str) -> Xoshiro256:
        gen = self._streams.get(label)
        if gen is None:
            gen = self._streams[label] = Xoshiro256(derive_seed(self.seed, label))
        return gen

    def __getattr__(self, label: str) -> Xoshiro256:
        if label.startswith("_") or label not in self.LABELS:
            raise AttributeError(label)
        return self[label]
