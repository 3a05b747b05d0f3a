"""Cued-recall associative memory with bounded capacity.

Pairs ``cue -> target`` gain strength each time they are observed.  A cue
recalls its target only once the pair is strong enough, and even then only
with probability ``reliability``.  When full, the least recently used pair
is evicted.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass

from .rng import RandomnessSource


@dataclass
class Association:
    target: str
    strength: int
    last_used: int


class AssocMemory:
    def __init__(self, capacity: int = 64, reliability: float = 1.0, threshold: int = 3):
        if capacity < 1:
            raise ValueError("capacity must be at least 1")
        if not 0.0 <= reliability <= 1.0:
            raise ValueError("reliability must lie in [0, 1]")
        if threshold < 1:
            raise ValueError("activation threshold must be at least 1")
        self.capacity = capacity
        self.reliability = reliability
        self.threshold = threshold
        # insertion order == recency order, oldest first
        self.pairs: OrderedDict[str, Association] = OrderedDict()

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, cue: str) -> bool:
        return cue in self.pairs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AssocMemory):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def strength(self, cue: str) -> int:
        a = self.pairs.get(cue)
        return a.strength if a else 0

    def observe_pair(self, cue: str, target: str, tick: int) -> AssocMemory:
        if cue == target:
            raise ValueError("cue and target must differ")
        a = self.pairs.get(cue)
        if a is None:
            self.pairs[cue] = Association(target, 1, tick)
            if len(self.pairs) > self.capacity:
                self.pairs.popitem(last=False)
        else:
            if a.target == target:
                a.strength += 1
            else:
                # a different follower overwrites the old association
                a.target, a.strength = target, 1
            a.last_used = tick
            self.pairs.move_to_end(cue)
        return self

    def recall(self, cue: str, rng: RandomnessSource, tick: int) -> str | None:
        a = self.pairs.get(cue)
        if a is None or a.strength < self.threshold:
            return None
        if not rng.bernoulli(self.reliability):
            return None
        a.last_used = tick
        self.pairs.move_to_end(cue)
        return a.target

    def lru_order(self) -> list[str]:
        """Cues from least to most recently used."""
        return list(self.pairs)

    def copy(self) -> AssocMemory:
        m = AssocMemory(self.capacity, self.reliability, self.threshold)
        for cue, a in self.pairs.items():
            m.pairs[cue] = Association(a.target, a.strength, a.last_used)
        return m

    def to_dict(self) -> dict:
        return {
            "capacity": self.capacity,
            "reliability": self.reliability,
            "threshold": self.threshold,
            "pairs": [[cue, a.target, a.strength, a.last_used] for cue, a in self.pairs.items()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> AssocMemory:
        m = cls(d["capacity"], d["reliability"], d["threshold"])
        for cue, target, strength, last in d["pairs"]:
            m.pairs[cue] = Association(target, strength, last)
        return m
