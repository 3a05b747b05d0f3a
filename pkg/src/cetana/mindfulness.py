"""Mindfulness as quoting the previous moment, its training schedule, and
attention-based consciousness layers."""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, replace

from .core import (
    PRESENCE_THRESHOLD,
    UNWHOLESOME_FACTORS,
    BodyInput,
    Ceta,
    QuotedObject,
    Trace,
    WorldState,
)
from .errors import CapacityExceeded, IndexOutOfTrace, OutOfRange, TimeMismatch
from .rng import RandomnessSource


@dataclass(frozen=True)
class MindfulnessConfig:
    """How mindfulness acts and how often it is practised.

    ``strength`` is how many consecutive eligible ticks one practice session
    lasts (``None`` for unbounded); ``sharpness`` applies it on every n-th
    tick; ``rest`` eligible ticks are skipped between sessions.
    """

    enabled: bool = True
    strength: int | None = None
    sharpness: int = 1
    rest: int = 0
    right: bool = False
    rho: float = 0.5
    equanimity_floor: float = 0.5
    unwholesome: frozenset[str] = UNWHOLESOME_FACTORS
    threshold: float = PRESENCE_THRESHOLD
    # extra quotes: attended pixel values, and the change of mind-state itself
    quote_focus: bool = False
    insight: bool = False

    def __post_init__(self) -> None:
        if self.sharpness < 1:
            raise ValueError("sharpness must be >= 1")
        if self.strength is not None and self.strength < 0:
            raise ValueError("strength must be >= 0")
        if self.rest < 0:
            raise ValueError("rest must be >= 0")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [0, 1]")
        if not 0.0 <= self.equanimity_floor <= 1.0:
            raise ValueError("equanimity_floor must lie in [0, 1]")
        object.__setattr__(self, "unwholesome", frozenset(self.unwholesome))


def strongest_unwholesome(c: Ceta, cfg: MindfulnessConfig) -> str | None:
    present = [
        (-v, name)
        for name, v in c.mind.factors
        if name in cfg.unwholesome and v >= cfg.threshold
    ]
    # ties resolve to the lexicographically first name
    return min(present)[1] if present else None


def apply_mindfulness(c_prev: Ceta, c_next: Ceta, cfg: MindfulnessConfig) -> Ceta:
    """Make ``c_next`` mindful of ``c_prev``.

    Quotes the strongest present unwholesome factor of ``c_prev`` (or its
    mind-state as a whole when there is none), damps that factor in
    ``c_next`` by ``rho``, lifts equanimity (and friendliness, for right
    mindfulness) to at least the floor, and marks mindfulness present.
    """
    if c_next.t != c_prev.t + 1:
        raise TimeMismatch(f"expected t={c_prev.t + 1}, got {c_next.t}")
    src = c_prev.t
    target = strongest_unwholesome(c_prev, cfg)
    quotes = [QuotedObject(src, f"factor:{target}" if target else "mind")]
    if cfg.quote_focus:
        quotes.extend(QuotedObject(src, f"object:{c_prev.body.pixels[i]}") for i in c_prev.body.focus)
    if cfg.insight and c_prev.mind != c_next.mind:
        quotes.append(QuotedObject(src, "fluctuation"))

    factors = c_next.mind.factor_dict()
    if target is not None and target in factors:
        factors[target] = factors[target] * cfg.rho
    factors["equanimity"] = max(factors.get("equanimity", 0.0), cfg.equanimity_floor)
    if cfg.right:
        factors["friendliness"] = max(factors.get("friendliness", 0.0), cfg.equanimity_floor)
    factors["mindfulness"] = 1.0
    return replace(
        c_next,
        mental=c_next.mental.with_objects(*quotes),
        mind=replace(c_next.mind, factors=tuple(factors.items())),
    )


def training_mask(cfg: MindfulnessConfig, n_ticks: int, start: int = 0) -> list[bool]:
    """Per-tick practice mask over ``n_ticks`` positions.

    Positions ``start, start + sharpness, ...`` are eligible.  Eligible
    positions are grouped into sessions of ``strength`` applications
    followed by ``rest`` skipped ones.
    """
    mask = [False] * n_ticks
    if not cfg.enabled or cfg.strength == 0:
        return mask
    for e, k in enumerate(range(start, n_ticks, cfg.sharpness)):
        if cfg.strength is None or e % (cfg.strength + cfg.rest) < cfg.strength:
            mask[k] = True
    return mask


def scheduled_count(cfg: MindfulnessConfig, n_ticks: int, start: int = 0) -> int:
    """Closed form for ``sum(training_mask(cfg, n_ticks, start))``."""
    if not cfg.enabled or cfg.strength == 0 or n_ticks <= start:
        return 0
    eligible = math.ceil((n_ticks - start) / cfg.sharpness)
    if cfg.strength is None:
        return eligible
    cycle = cfg.strength + cfg.rest
    full, partial = divmod(eligible, cycle)
    return full * cfg.strength + min(partial, cfg.strength)


def mindfulness_hook(mask: Sequence[bool], cfg: MindfulnessConfig, t0: int = 0):
    """Run-loop hook applying mindfulness on ticks where ``mask`` is set."""

    def hook(c_prev: Ceta, c_next: Ceta, w_next: WorldState, rng: RandomnessSource) -> Ceta:
        k = c_next.t - t0
        if 0 <= k < len(mask) and mask[k]:
            return apply_mindfulness(c_prev, c_next, cfg)
        return c_next

    return hook


def set_focus(
    c: Ceta,
    focus: Iterable[int],
    selected: Iterable[str] | None = None,
    *,
    attention_capacity: int | None = None,
    action_capacity: int | None = None,
) -> Ceta:
    focus = frozenset(focus)
    bad = sorted(i for i in focus if not 0 <= i < len(c.body.pixels))
    if bad:
        raise OutOfRange(f"focus indices {bad} outside {len(c.body.pixels)} pixels")
    if attention_capacity is not None and len(focus) > attention_capacity:
        raise CapacityExceeded(f"{len(focus)} attended pixels exceed capacity {attention_capacity}")
    action = c.action
    if selected is not None:
        selected = frozenset(selected)
        stray = sorted(selected - c.action.menu)
        if stray:
            raise OutOfRange(f"actions {stray} not in menu")
        if action_capacity is not None and len(selected) > action_capacity:
            raise CapacityExceeded(f"{len(selected)} selected actions exceed capacity {action_capacity}")
        action = replace(action, selected=selected)
    return replace(c, body=BodyInput(c.body.pixels, focus), action=action)


class Layer(enum.Enum):
    NOT_PRESENT = "notPresent"
    PRE = "pre"
    PROTO = "proto"
    FULL = "full"


def object_quote(value: int, t: int) -> QuotedObject:
    return QuotedObject(t, f"object:{value}")


def classify_layer(tr: Trace, obj: int, t: int, threshold: float = PRESENCE_THRESHOLD) -> Layer:
    """Consciousness layer of the pixel value ``obj`` at tick ``t``.

    Pre: among the pixels but unattended.  Proto: attended.  Full: attended
    and quoted by a mindful next moment.
    """
    try:
        c = tr.ceta_at(t)
        nxt = tr.ceta_at(t + 1)
    except IndexError as exc:
        raise IndexOutOfTrace(str(exc)) from exc
    indices = [i for i, p in enumerate(c.body.pixels) if p == obj]
    if not indices:
        return Layer.NOT_PRESENT
    if not any(i in c.body.focus for i in indices):
        return Layer.PRE
    if nxt.mind.present("mindfulness", threshold) and object_quote(obj, t) in nxt.mental.objects:
        return Layer.FULL
    return Layer.PROTO
