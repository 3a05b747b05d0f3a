"""Immutable value types for mind-moments (cetas), world states and traces.

A ceta is the quintuple ``(body input, mental input, feeling tone,
mental factors, action)`` at one integer time index.  Every type here is a
frozen dataclass, hashable, and has a canonical JSON form: equal values
serialize to byte-identical text.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from typing import Any, NamedTuple, Union

PRESENCE_THRESHOLD = 0.05

UNWHOLESOME_FACTORS = frozenset({"anger", "aversion", "desire", "fear"})
BASE_FACTORS = (
    "anger",
    "aversion",
    "compassion",
    "desire",
    "equanimity",
    "fear",
    "friendliness",
    "mindfulness",
    "wrongView",
)


class FeelingTone(enum.IntEnum):
    VERY_UNPLEASANT = -2
    UNPLEASANT = -1
    NEUTRAL = 0
    PLEASANT = 1
    VERY_PLEASANT = 2


FactorMap = tuple[tuple[str, float], ...]


def _normalize_factors(factors: Mapping[str, float] | Iterable[tuple[str, float]]) -> FactorMap:
    items = factors.items() if isinstance(factors, Mapping) else factors
    out: dict[str, float] = {}
    for name, value in items:
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"factor {name!r} intensity {value} outside [0, 1]")
        if name in out:
            raise ValueError(f"factor {name!r} given twice")
        out[name] = value
    # zero intensity and absence are the same state
    return tuple(sorted((k, v) for k, v in out.items() if v != 0.0))


@dataclass(frozen=True)
class MindState:
    """Feeling tone plus the array of mental factor intensities."""

    feeling: FeelingTone = FeelingTone.NEUTRAL
    factors: FactorMap = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "feeling", FeelingTone(self.feeling))
        object.__setattr__(self, "factors", _normalize_factors(self.factors))

    def intensity(self, name: str) -> float:
        for k, v in self.factors:
            if k == name:
                return v
        return 0.0

    def present(self, name: str, threshold: float = PRESENCE_THRESHOLD) -> bool:
        return self.intensity(name) >= threshold

    def factor_dict(self) -> dict[str, float]:
        return dict(self.factors)

    def with_factors(self, **updates: float) -> MindState:
        merged = self.factor_dict()
        merged.update(updates)
        return MindState(self.feeling, merged)


@dataclass(frozen=True, order=True)
class MentalObject:
    """A concept, image or intention held in mental input."""

    kind: str
    ref: str

    KINDS = ("concept", "image", "intention")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown mental object kind {self.kind!r}")
        if ";" in self.ref:
            raise ValueError("object ids may not contain ';'")

    @property
    def origin(self) -> str:
        return "mental"

    def key(self) -> str:
        return f"{self.kind}:{self.ref}"


@dataclass(frozen=True, order=True)
class QuotedObject:
    """A fragment of an earlier ceta re-presented as mental input.

    ``content`` is one of ``factor:<name>``, ``feeling:<n>``, ``mind``,
    ``object:<pixel value>`` or ``fluctuation``.
    """

    source: int
    content: str

    def __post_init__(self) -> None:
        if ";" in self.content:
            raise ValueError("quote content may not contain ';'")

    @property
    def origin(self) -> str:
        return "mental"

    def key(self) -> str:
        return f"quote@{self.source}:{self.content}"


MentalItem = Union[MentalObject, QuotedObject]


def concept(ref: str) -> MentalObject:
    return MentalObject("concept", ref)


def image(ref: str) -> MentalObject:
    return MentalObject("image", ref)


def intention(action_id: str) -> MentalObject:
    return MentalObject("intention", action_id)


def parse_mental_item(key: str) -> MentalItem:
    head, sep, rest = key.partition(":")
    if not sep:
        raise ValueError(f"malformed mental object {key!r}")
    if head.startswith("quote@"):
        return QuotedObject(int(head[len("quote@"):]), rest)
    return MentalObject(head, rest)


@dataclass(frozen=True)
class MentalInput:
    objects: frozenset[MentalItem] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", frozenset(self.objects))

    def keys(self) -> list[str]:
        return sorted(o.key() for o in self.objects)

    def quotes(self) -> list[QuotedObject]:
        return [o for o in self.objects if isinstance(o, QuotedObject)]

    def unquoted(self) -> MentalInput:
        return MentalInput(o for o in self.objects if not isinstance(o, QuotedObject))

    def with_objects(self, *items: MentalItem) -> MentalInput:
        return MentalInput(self.objects | frozenset(items))


@dataclass(frozen=True)
class BodyInput:
    """Sense vector plus the attended index subset."""

    pixels: tuple[int, ...] = ()
    focus: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "pixels", tuple(int(p) for p in self.pixels))
        object.__setattr__(self, "focus", frozenset(int(i) for i in self.focus))
        bad = [i for i in self.focus if not 0 <= i < len(self.pixels)]
        if bad:
            raise ValueError(f"focus indices {sorted(bad)} outside pixel range {len(self.pixels)}")


@dataclass(frozen=True)
class Action:
    menu: frozenset[str] = frozenset()
    selected: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "menu", frozenset(self.menu))
        object.__setattr__(self, "selected", frozenset(self.selected))
        extra = self.selected - self.menu
        if extra:
            raise ValueError(f"selected actions {sorted(extra)} not in menu")

    def select(self, *ids: str) -> Action:
        return Action(self.menu, frozenset(ids))


@dataclass(frozen=True)
class Ceta:
    body: BodyInput = field(default_factory=BodyInput)
    mental: MentalInput = field(default_factory=MentalInput)
    mind: MindState = field(default_factory=MindState)
    action: Action = field(default_factory=Action)
    t: int = 0

    @property
    def feeling(self) -> FeelingTone:
        return self.mind.feeling

    def at(self, t: int) -> Ceta:
        return replace(self, t=t)


@dataclass(frozen=True)
class WorldState:
    """Environment configuration.

    ``cells`` is a nested tuple of scalars (and possibly cetas, for a world
    that wraps another agent); only the owning world interprets it.
    """

    kind: str
    cells: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "cells", _freeze(self.cells))


def _freeze(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


class FiveGroups(NamedTuple):
    body: BodyInput
    mental: MentalInput
    feeling: FeelingTone
    factors: FactorMap
    action: Action


def decompose_ceta(c: Ceta) -> FiveGroups:
    return FiveGroups(c.body, c.mental, c.mind.feeling, c.mind.factors, c.action)


def recompose_ceta(groups: FiveGroups | tuple, t: int) -> Ceta:
    body, mental, feeling, factors, action = groups
    return Ceta(body, mental, MindState(feeling, factors), action, t)


@dataclass(frozen=True)
class Trace:
    """Contiguous time-indexed run of ``(ceta, world)`` pairs."""

    entries: tuple[tuple[Ceta, WorldState], ...]
    t0: int = 0
    seed: int = 0
    scenario_id: str = ""
    # snapshot of the agent's associative memory after the last tick
    memory: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        for k, (c, _) in enumerate(self.entries):
            if c.t != self.t0 + k:
                raise ValueError(f"entry {k} has t={c.t}, expected {self.t0 + k}")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def cetas(self) -> list[Ceta]:
        return [c for c, _ in self.entries]

    @property
    def worlds(self) -> list[WorldState]:
        return [w for _, w in self.entries]

    def index(self, t: int) -> int:
        """Position of absolute tick ``t`` in ``entries``."""
        k = t - self.t0
        if not 0 <= k < len(self.entries):
            raise IndexError(f"tick {t} outside trace [{self.t0}, {self.t0 + len(self.entries)})")
        return k

    def ceta_at(self, t: int) -> Ceta:
        return self.entries[self.index(t)][0]

    def prefix(self, n: int) -> Trace:
        return replace(self, entries=self.entries[:n])


class Group(str, enum.Enum):
    BODY = "bodyInput"
    MENTAL = "mentalInput"
    FEELING = "feeling"
    FACTORS = "factors"
    ACTION = "action"
    MIND = "mindState"


def substream(tr: Trace, group: Group | str) -> list:
    group = Group(group)
    cetas = tr.cetas
    if group is Group.MIND:
        return [c.mind for c in cetas]
    return [getattr(decompose_ceta(c), _GROUP_FIELD[group]) for c in cetas]


_GROUP_FIELD = {
    Group.BODY: "body",
    Group.MENTAL: "mental",
    Group.FEELING: "feeling",
    Group.FACTORS: "factors",
    Group.ACTION: "action",
}


# -- canonical JSON -----------------------------------------------------------


def ceta_to_dict(c: Ceta) -> dict:
    return {
        "t": c.t,
        "pixels": list(c.body.pixels),
        "focus": sorted(c.body.focus),
        "mental": c.mental.keys(),
        "feeling": int(c.mind.feeling),
        "factors": dict(c.mind.factors),
        "menu": sorted(c.action.menu),
        "selected": sorted(c.action.selected),
    }


def ceta_from_dict(d: Mapping) -> Ceta:
    return Ceta(
        body=BodyInput(tuple(d["pixels"]), frozenset(d["focus"])),
        mental=MentalInput(parse_mental_item(k) for k in d["mental"]),
        mind=MindState(FeelingTone(d["feeling"]), d["factors"]),
        action=Action(frozenset(d["menu"]), frozenset(d["selected"])),
        t=int(d["t"]),
    )


def _encode_cell(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_encode_cell(v) for v in value]
    if isinstance(value, Ceta):
        return {"ceta": ceta_to_dict(value)}
    return value


def _decode_cell(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_decode_cell(v) for v in value)
    if isinstance(value, dict):
        return ceta_from_dict(value["ceta"])
    return value


def world_to_dict(w: WorldState) -> dict:
    return {"kind": w.kind, "cells": _encode_cell(w.cells)}


def world_from_dict(d: Mapping) -> WorldState:
    return WorldState(d["kind"], _decode_cell(d["cells"]))


def canonical_json(obj: Any) -> str:
    """Deterministic key-sorted compact JSON for cetas, worlds or plain data."""
    if isinstance(obj, Ceta):
        obj = ceta_to_dict(obj)
    elif isinstance(obj, WorldState):
        obj = world_to_dict(obj)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)
