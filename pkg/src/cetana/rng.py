"""Seeded, replayable randomness threaded explicitly through transitions."""

from __future__ import annotations

import copy
import hashlib
import random
from collections.abc import Sequence
from typing import TypeVar

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


def _mix(seed: int, key: tuple) -> int:
    digest = hashlib.blake2b(repr((seed, key)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class RandomnessSource:
    """A deterministic draw sequence identified by a 64-bit seed.

    Equal seeds give equal draw sequences. ``draws`` counts every value
    handed out, so two sources can be compared for lock-step use.
    """

    def __init__(self, seed: int, key: tuple = ()):
        self.seed = int(seed) & _MASK64
        self.key = tuple(key)
        self.draws = 0
        self._rng = random.Random(_mix(self.seed, self.key))

    def __repr__(self) -> str:
        return f"RandomnessSource(seed={self.seed}, key={self.key!r}, draws={self.draws})"

    def child(self, *key) -> RandomnessSource:
        """Independent sub-stream addressed by ``key``; consumes no draws."""
        return RandomnessSource(self.seed, self.key + key)

    def spawn(self) -> RandomnessSource:
        """Fresh source seeded from the next 64-bit draw of this one."""
        return RandomnessSource(self.bits64())

    def clone(self) -> RandomnessSource:
        return copy.deepcopy(self)

    def bits64(self) -> int:
        self.draws += 1
        return self._rng.getrandbits(64)

    def random(self) -> float:
        self.draws += 1
        return self._rng.random()

    def bernoulli(self, p: float) -> bool:
        return self.random() < p

    def randrange(self, n: int) -> int:
        self.draws += 1
        return self._rng.randrange(n)

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randrange(len(items))]

    def weighted(self, items: Sequence[T], weights: Sequence[float]) -> T:
        """One draw from ``items`` with the given non-negative weights."""
        total = float(sum(weights))
        if total <= 0:
            raise ValueError("weights must have a positive sum")
        u = self.random() * total
        acc = 0.0
        for item, w in zip(items, weights):
            acc += w
            if u < acc:
                return item
        return items[-1]
