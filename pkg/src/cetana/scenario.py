"""Scenario files: sectioned ``key = value`` text.

::

    # comments run to end of line
    [scenario]
    id = pavlov
    seed = 42
    steps = 100

    [world]
    kind = rewardBandit
    arm.bell = 2:0.9, 0:0.1

Lists are comma separated; maps are ``name:value`` lists.  Keys are unique
within a section and every key must be known.  ``serialize`` writes every
field explicitly, so ``parse(serialize(s)) == s``.
"""

from __future__ import annotations

import re
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any

from .core import BASE_FACTORS, MentalObject, parse_mental_item
from .errors import CetanaError

_ID = re.compile(r"^[A-Za-z0-9_.@\-]+$")
_MAX_SEED = (1 << 64) - 1


class ScenarioError(CetanaError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + message)
        self.line = line
        self.col = col


class ScenarioSyntaxError(ScenarioError):
    pass


class UnknownKeyError(ScenarioError):
    pass


class DuplicateKeyError(UnknownKeyError):
    pass


class MissingRequiredError(ScenarioError):
    pass


class ScenarioRangeError(ScenarioError):
    pass


# -- value codecs -------------------------------------------------------------


def _ident(s: str) -> str:
    if not _ID.match(s):
        raise ValueError(f"bad identifier {s!r}")
    return s


def _bool(s: str) -> bool:
    if s in ("true", "false"):
        return s == "true"
    raise ValueError(f"expected true or false, got {s!r}")


def _list(item: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        return tuple(item(p.strip()) for p in s.split(",")) if s.strip() else ()
    return parse


def _pairs(value: Callable[[str], Any]) -> Callable[[str], tuple]:
    def parse(s: str) -> tuple:
        out = []
        for p in s.split(",") if s.strip() else ():
            k, sep, v = p.strip().rpartition(":")
            if not sep:
                raise ValueError(f"expected name:value, got {p.strip()!r}")
            out.append((k.strip(), value(v.strip())))
        return tuple(out)
    return parse


def _optional(inner: Callable[[str], Any]) -> Callable[[str], Any]:
    def parse(s: str) -> Any:
        return None if s == "none" else inner(s)
    return parse


def _window(s: str) -> tuple[int, int]:
    a, sep, b = s.partition("..")
    if not sep:
        raise ValueError(f"expected a..b, got {s!r}")
    return int(a), int(b)


def _mental(s: str) -> str:
    item = parse_mental_item(s)
    if not isinstance(item, MentalObject):
        raise ValueError("clamped mental input cannot contain quotes")
    return s


_int = int
_float = float
_ids = _list(_ident)
_ints = _list(int)


# -- scenario model -------------------------------------------------------------


@dataclass(frozen=True)
class WorldParams:
    kind: str = "rewardBandit"
    width: int = 8
    height: int = 8
    density: float = 0.3
    # ((arm, ((feeling, probability), ...)), ...)
    arms: tuple = ()


@dataclass(frozen=True)
class AgentParams:
    rule: str | None = None
    factors: tuple[str, ...] = ()
    menu: tuple[str, ...] | None = None
    policy: tuple[tuple[str, float], ...] = ()
    impulse: str | None = None
    anger_gain: float = 0.0
    desire_gain: float = 0.0
    decay: float = 0.9
    self_rate: float = 0.0
    attention: int = 8
    action_attention: int = 1
    table: tuple[int, ...] = ()
    table_factor: str = "phase"
    fear_on_exposure: float = 0.0
    initial: tuple[tuple[str, float], ...] = ()
    feeling: int = 0
    focus: tuple[int, ...] | None = None


@dataclass(frozen=True)
class MemoryParams:
    enabled: bool = False
    capacity: int = 64
    reliability: float = 1.0
    threshold: int = 3


@dataclass(frozen=True)
class MindfulnessParams:
    enabled: bool = False
    strength: int | None = None
    sharpness: int = 1
    rest: int = 0
    start: int = 0
    right: bool = False
    rho: float = 0.5
    equanimity_floor: float = 0.5
    quote_focus: bool = False
    insight: bool = False


@dataclass(frozen=True)
class ConcentrationParams:
    enabled: bool = False
    pixels: tuple[int, ...] = ()
    focus: tuple[int, ...] = ()
    mental: tuple[str, ...] = ()
    action: tuple[str, ...] = ()
    start: int = 0
    drift: float = 0.0
    recovery: bool = True


@dataclass(frozen=True)
class ResetParams:
    enabled: bool = False
    cycles: int = 2
    coverage: float = 0.8


@dataclass(frozen=True)
class MetricsParams:
    window: tuple[int, int] | None = None
    horizon: int = 3
    rollouts: int = 20
    epsilon: float = 0.05
    track: tuple[int, ...] = ()
    self_concepts: tuple[str, ...] = ()
    fear_level: float = 0.5
    # optional per-tick columns in trace.csv: pain, lack
    columns: tuple[str, ...] = ()


@dataclass(frozen=True)
class Scenario:
    id: str = "scenario"
    seed: int = 0
    steps: int = 0
    t0: int = 0
    world: WorldParams = field(default_factory=WorldParams)
    agent: AgentParams = field(default_factory=AgentParams)
    memory: MemoryParams = field(default_factory=MemoryParams)
    mindfulness: MindfulnessParams = field(default_factory=MindfulnessParams)
    concentration: ConcentrationParams = field(default_factory=ConcentrationParams)
    reset: ResetParams = field(default_factory=ResetParams)
    metrics: MetricsParams = field(default_factory=MetricsParams)

    @property
    def rule(self) -> str:
        if self.agent.rule is not None:
            return self.agent.rule
        return "bandit" if self.world.kind == "rewardBandit" else "observer"

    @property
    def arms(self) -> dict[str, tuple[tuple[int, float], ...]]:
        from .worlds import DEFAULT_ARMS

        return dict(self.world.arms) if self.world.arms else dict(DEFAULT_ARMS)

    @property
    def menu(self) -> tuple[str, ...]:
        if self.agent.menu is not None:
            return self.agent.menu
        if self.world.kind == "rewardBandit" and self.rule == "bandit":
            return tuple(sorted(self.arms))
        return ()

    @property
    def registry(self) -> tuple[str, ...]:
        extra = set(self.agent.factors)
        if self.rule == "table":
            extra.add(self.agent.table_factor)
        return tuple(sorted(set(BASE_FACTORS) | extra))


# key -> (attribute, parser); [scenario] keys live on Scenario itself
_SCHEMA: dict[str, tuple[str | None, type, dict[str, tuple[str, Callable[[str], Any]]]]] = {
    "scenario": (None, Scenario, {
        "id": ("id", _ident), "seed": ("seed", _int), "steps": ("steps", _int), "t0": ("t0", _int),
    }),
    "world": ("world", WorldParams, {
        "kind": ("kind", _ident), "width": ("width", _int), "height": ("height", _int),
        "density": ("density", _float),
    }),
    "agent": ("agent", AgentParams, {
        "rule": ("rule", _optional(_ident)), "factors": ("factors", _ids),
        "menu": ("menu", _optional(_ids)), "policy": ("policy", _pairs(float)),
        "impulse": ("impulse", _optional(_ident)), "anger_gain": ("anger_gain", _float),
        "desire_gain": ("desire_gain", _float), "decay": ("decay", _float),
        "self_rate": ("self_rate", _float), "attention": ("attention", _int),
        "action_attention": ("action_attention", _int), "table": ("table", _ints),
        "table_factor": ("table_factor", _ident), "fear_on_exposure": ("fear_on_exposure", _float),
        "initial": ("initial", _pairs(float)), "feeling": ("feeling", _int),
        "focus": ("focus", _optional(_ints)),
    }),
    "memory": ("memory", MemoryParams, {
        "enabled": ("enabled", _bool), "capacity": ("capacity", _int),
        "reliability": ("reliability", _float), "threshold": ("threshold", _int),
    }),
    "mindfulness": ("mindfulness", MindfulnessParams, {
        "enabled": ("enabled", _bool), "strength": ("strength", _optional(int)),
        "sharpness": ("sharpness", _int), "rest": ("rest", _int), "start": ("start", _int),
        "right": ("right", _bool), "rho": ("rho", _float),
        "equanimity_floor": ("equanimity_floor", _float), "quote_focus": ("quote_focus", _bool),
        "insight": ("insight", _bool),
    }),
    "concentration": ("concentration", ConcentrationParams, {
        "enabled": ("enabled", _bool), "pixels": ("pixels", _ints), "focus": ("focus", _ints),
        "mental": ("mental", _list(_mental)), "action": ("action", _ids), "start": ("start", _int),
        "drift": ("drift", _float), "recovery": ("recovery", _bool),
    }),
    "reset": ("reset", ResetParams, {
        "enabled": ("enabled", _bool), "cycles": ("cycles", _int), "coverage": ("coverage", _float),
    }),
    "metrics": ("metrics", MetricsParams, {
        "window": ("window", _optional(_window)), "horizon": ("horizon", _int),
        "rollouts": ("rollouts", _int), "epsilon": ("epsilon", _float), "track": ("track", _ints),
        "self_concepts": ("self_concepts", _ids), "fear_level": ("fear_level", _float),
        "columns": ("columns", _ids),
    }),
}

_REQUIRED = {("scenario", "seed"), ("scenario", "steps"), ("world", "kind")}

_ARM_PARSE = _pairs(float)


def _parse_arm(value: str) -> tuple[tuple[int, float], ...]:
    return tuple((int(f), p) for f, p in _ARM_PARSE(value))


def parse_scenario(text: str, strict: bool = True, warn: Callable[[str], None] | None = None) -> Scenario:
    """Parse scenario text.

    With ``strict`` off, unknown keys are reported through ``warn`` and
    skipped instead of raising; duplicates and malformed values always raise.
    """
    values: dict[str, dict[str, Any]] = {name: {} for name in _SCHEMA}
    arms: list[tuple[str, tuple]] = []
    seen: dict[tuple[str, str], int] = {}
    section: str | None = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ScenarioSyntaxError("unterminated section header", lineno, indent + 1)
            name = stripped[1:-1].strip()
            if name not in _SCHEMA:
                raise UnknownKeyError(f"unknown section [{name}]", lineno, indent + 1)
            section = name
            continue
        key, eq, value = stripped.partition("=")
        if not eq:
            raise ScenarioSyntaxError("expected 'key = value'", lineno, indent + 1)
        key, value = key.strip(), value.strip()
        if not key:
            raise ScenarioSyntaxError("empty key", lineno, indent + 1)
        if section is None:
            raise ScenarioSyntaxError("entry before any [section]", lineno, indent + 1)
        if (section, key) in seen:
            raise DuplicateKeyError(
                f"duplicate key {key!r} in [{section}] (first on line {seen[section, key]})",
                lineno, indent + 1,
            )
        seen[section, key] = lineno
        eq = raw.index("=") + 1
        col = eq + len(raw[eq:]) - len(raw[eq:].lstrip()) + 1
        if section == "world" and key.startswith("arm."):
            try:
                arms.append((_ident(key[4:]), _parse_arm(value)))
            except ValueError as exc:
                raise ScenarioSyntaxError(str(exc), lineno, col) from exc
            continue
        spec = _SCHEMA[section][2].get(key)
        if spec is None:
            msg = f"unknown key {key!r} in [{section}]"
            if strict:
                raise UnknownKeyError(msg, lineno, indent + 1)
            if warn:
                warn(f"line {lineno}: {msg} (ignored)")
            continue
        attr, parse = spec
        try:
            values[section][attr] = (parse(value), lineno)
        except ValueError as exc:
            raise ScenarioSyntaxError(f"bad value for {key!r}: {exc}", lineno, col) from exc

    for sec, key in sorted(_REQUIRED):
        if key not in {k for (s, k) in seen if s == sec}:
            raise MissingRequiredError(f"missing required key {key!r} in [{sec}]")

    lines = {sec: {a: ln for a, (_, ln) in vals.items()} for sec, vals in values.items()}
    plain = {sec: {a: v for a, (v, _) in vals.items()} for sec, vals in values.items()}
    sub = {}
    for sec, (attr, cls, _) in _SCHEMA.items():
        if attr is not None:
            sub[attr] = cls(**plain[sec])
    if arms:
        sub["world"] = replace(sub["world"], arms=tuple(sorted(arms)))
    scenario = Scenario(**plain["scenario"], **sub)
    validate(scenario, lines)
    return scenario


def _check(cond: bool, msg: str, lines: dict, sec: str, attr: str) -> None:
    if not cond:
        raise ScenarioRangeError(msg, lines.get(sec, {}).get(attr, 0), 1)


def validate(s: Scenario, lines: dict | None = None) -> None:
    """Range and cross-reference checks; raises :class:`ScenarioRangeError`."""
    from .agents import AGENT_RULES
    from .worlds import WORLD_KINDS

    L = lines or {}
    _check(0 <= s.seed <= _MAX_SEED, "seed must be a 64-bit unsigned integer", L, "scenario", "seed")
    _check(s.steps >= 0, "steps must be >= 0", L, "scenario", "steps")
    w = s.world
    _check(w.kind in WORLD_KINDS, f"world kind must be one of {WORLD_KINDS}", L, "world", "kind")
    _check(w.width >= 1 and w.height >= 1, "grid dimensions must be >= 1", L, "world", "width")
    _check(0.0 <= w.density <= 1.0, "density must lie in [0, 1]", L, "world", "density")
    _check(not w.arms or w.kind == "rewardBandit", "arm.* entries need kind = rewardBandit", L, "world", "kind")
    for arm, dist in w.arms:
        _check(all(-2 <= f <= 2 and p >= 0 for f, p in dist), f"arm {arm}: tones in -2..2, p >= 0", L, "world", "arms")
        _check(abs(sum(p for _, p in dist) - 1.0) <= 1e-9, f"arm {arm}: probabilities must sum to 1", L, "world", "arms")

    a = s.agent
    _check(s.rule in AGENT_RULES, f"agent rule must be one of {AGENT_RULES}", L, "agent", "rule")
    menu = set(s.menu)
    registry = set(s.registry)
    for name, p in a.policy:
        _check(name in menu, f"policy action {name!r} not in menu", L, "agent", "policy")
        _check(p >= 0, "policy weights must be >= 0", L, "agent", "policy")
    if s.rule == "bandit":
        _check(bool(menu), "bandit agent needs a non-empty menu", L, "agent", "menu")
        _check(not a.policy or sum(p for _, p in a.policy) > 0, "policy weights must not all be 0", L, "agent", "policy")
    _check(a.impulse is None or a.impulse in menu, "impulse action not in menu", L, "agent", "impulse")
    for name, v in a.initial:
        _check(name in registry, f"factor {name!r} not declared", L, "agent", "initial")
        _check(0.0 <= v <= 1.0, "factor intensities must lie in [0, 1]", L, "agent", "initial")
    for attr in ("anger_gain", "desire_gain", "decay", "self_rate", "fear_on_exposure"):
        _check(0.0 <= getattr(a, attr) <= 1.0, f"{attr} must lie in [0, 1]", L, "agent", attr)
    _check(a.attention >= 0 and a.action_attention >= 1, "attention capacities out of range", L, "agent", "attention")
    _check(-2 <= a.feeling <= 2, "feeling must lie in -2..2", L, "agent", "feeling")
    _check(len(a.focus or ()) <= a.attention, "initial focus exceeds attention capacity", L, "agent", "focus")
    if s.rule == "table":
        n = len(a.table)
        _check(n >= 1 and all(0 <= k < n for k in a.table), "table entries must index the table", L, "agent", "table")
    _check(a.self_rate == 0.0 or bool(s.metrics.self_concepts), "self_rate needs metrics.self_concepts", L, "agent", "self_rate")

    m = s.memory
    _check(not m.enabled or s.rule == "bandit", "memory is only consulted by the bandit rule", L, "memory", "enabled")
    _check(m.capacity >= 1, "memory capacity must be >= 1", L, "memory", "capacity")
    _check(0.0 <= m.reliability <= 1.0, "reliability must lie in [0, 1]", L, "memory", "reliability")
    _check(m.threshold >= 1, "threshold must be >= 1", L, "memory", "threshold")

    mf = s.mindfulness
    _check(mf.strength is None or mf.strength >= 0, "strength must be >= 0", L, "mindfulness", "strength")
    _check(mf.sharpness >= 1, "sharpness must be >= 1", L, "mindfulness", "sharpness")
    _check(mf.rest >= 0 and mf.start >= 0, "rest and start must be >= 0", L, "mindfulness", "rest")
    _check(0.0 <= mf.rho <= 1.0, "rho must lie in [0, 1]", L, "mindfulness", "rho")
    _check(0.0 <= mf.equanimity_floor <= 1.0, "equanimity_floor must lie in [0, 1]", L, "mindfulness", "equanimity_floor")

    c = s.concentration
    _check(all(0 <= i < len(c.pixels) for i in c.focus), "concentration focus outside pixels", L, "concentration", "focus")
    _check(set(c.action) <= menu, "concentration action not in menu", L, "concentration", "action")
    _check(len(c.action) <= a.action_attention, "concentration action exceeds action attention", L, "concentration", "action")
    _check(0.0 <= c.drift <= 1.0, "drift must lie in [0, 1]", L, "concentration", "drift")

    r = s.reset
    _check(r.cycles >= 1, "cycles must be >= 1", L, "reset", "cycles")
    _check(0.0 < r.coverage <= 1.0, "coverage must lie in (0, 1]", L, "reset", "coverage")

    mt = s.metrics
    _check(mt.window is None or mt.window[0] < mt.window[1], "window must be a..b with a < b", L, "metrics", "window")
    _check(mt.horizon >= 1 and mt.rollouts >= 1, "horizon and rollouts must be >= 1", L, "metrics", "horizon")
    _check(mt.epsilon >= 0, "epsilon must be >= 0", L, "metrics", "epsilon")
    _check(0.0 <= mt.fear_level <= 1.0, "fear_level must lie in [0, 1]", L, "metrics", "fear_level")
    _check(set(mt.columns) <= {"pain", "lack"}, "metric columns must be pain or lack", L, "metrics", "columns")
    _check(len(set(mt.columns)) == len(mt.columns), "metric columns repeat", L, "metrics", "columns")


def serialize_scenario(s: Scenario) -> str:
    out = []
    for sec, (attr, cls, keys) in _SCHEMA.items():
        obj = s if attr is None else getattr(s, attr)
        out.append(f"[{sec}]")
        for key, (field_name, _) in keys.items():
            fmt = _fmt_window if field_name == "window" else _fmt_value
            out.append(f"{key} = {fmt(getattr(obj, field_name))}")
        if sec == "world":
            for arm, dist in obj.arms:
                out.append(f"arm.{arm} = " + ", ".join(f"{f}:{p!r}" for f, p in dist))
        out.append("")
    return "\n".join(out)


def _fmt_value(v: Any) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(f"{x[0]}:{_fmt_value(x[1])}" if isinstance(x, tuple) else _fmt_value(x) for x in v)
    return str(v)


def _fmt_window(v: tuple[int, int] | None) -> str:
    return "none" if v is None else f"{v[0]}..{v[1]}"
