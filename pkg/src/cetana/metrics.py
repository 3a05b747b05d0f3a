"""Trace statistics: suffering, action wholesomeness, and exposure to the
compound, fluctuating and impersonal character of the stream."""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import asdict, dataclass, replace

from .core import PRESENCE_THRESHOLD, Ceta, FeelingTone, MindState, Trace, WorldState
from .dynamics import AgentSpec, Hook, WorldSpec, run
from .errors import EmptyWindow
from .rng import RandomnessSource

Window = tuple[int, int]


def window_cetas(tr: Trace, window: Window | None = None, min_len: int = 1) -> list[Ceta]:
    """Cetas with absolute tick in ``[start, stop)``; the whole trace if ``window`` is None."""
    cetas = tr.cetas
    if window is None:
        selected = cetas
    else:
        start, stop = window
        lo, hi = start - tr.t0, stop - tr.t0
        if lo < 0 or hi > len(cetas):
            raise EmptyWindow(f"window {start}..{stop} outside trace {tr.t0}..{tr.t0 + len(cetas)}")
        selected = cetas[lo:hi]
    if len(selected) < min_len:
        raise EmptyWindow(f"window holds {len(selected)} ticks, need at least {min_len}")
    return selected


def parse_window(text: str) -> Window:
    a, sep, b = text.partition("..")
    if not sep:
        raise ValueError(f"window must look like a..b, got {text!r}")
    return int(a), int(b)


def pain(feeling: FeelingTone) -> int:
    return max(0, -int(feeling))


def pain_metric(tr: Trace, window: Window | None = None) -> float:
    cetas = window_cetas(tr, window)
    return sum(pain(c.feeling) for c in cetas) / len(cetas)


def _selection_key(c: Ceta) -> str:
    return ",".join(sorted(c.action.selected))


def rigidity_metric(tr: Trace, window: Window | None = None, menu: Sequence[str] | None = None) -> float:
    """1 minus the normalised entropy of action selections over the window.

    Normalisation is by ``log |menu|``; a menu of one action is maximally
    rigid.
    """
    cetas = window_cetas(tr, window, min_len=2)
    if menu is None:
        menu = sorted(set().union(*(c.action.menu for c in cetas)))
    if len(menu) <= 1:
        return 1.0
    counts = Counter(_selection_key(c) for c in cetas)
    n = len(cetas)
    h = -sum((k / n) * math.log(k / n) for k in counts.values())
    return min(1.0, max(0.0, 1.0 - h / math.log(len(menu))))


def is_lack_tick(c: Ceta, fear_level: float = 0.5, threshold: float = PRESENCE_THRESHOLD) -> bool:
    return (
        c.mind.present("mindfulness", threshold)
        and any(q.content == "fluctuation" for q in c.mental.quotes())
        and c.mind.intensity("fear") >= fear_level
    )


def lack_events(
    tr: Trace,
    window: Window | None = None,
    fear_level: float = 0.5,
    threshold: float = PRESENCE_THRESHOLD,
) -> int:
    """Number of maximal runs of Lack ticks (mindful, exposed and afraid)."""
    episodes = 0
    inside = False
    for c in window_cetas(tr, window, min_len=0):
        hit = is_lack_tick(c, fear_level, threshold)
        if hit and not inside:
            episodes += 1
        inside = hit
    return episodes


def selfing_score(tr: Trace, self_concepts: Sequence[str] = (), window: Window | None = None) -> float:
    """Mean number of self-tagged concepts in mental input per tick."""
    cetas = window_cetas(tr, window, min_len=0)
    tags = set(self_concepts)
    if not cetas or not tags:
        return 0.0
    hits = sum(
        1
        for c in cetas
        for o in c.mental.objects
        if getattr(o, "kind", None) == "concept" and o.ref in tags
    )
    return hits / len(cetas)


def mind_change(a: MindState, b: MindState) -> int:
    """Count of factors whose intensity differs, plus one if the tone differs."""
    fa, fb = a.factor_dict(), b.factor_dict()
    changed = sum(1 for name in fa.keys() | fb.keys() if fa.get(name, 0.0) != fb.get(name, 0.0))
    return changed + (a.feeling != b.feeling)


def non_default_groups(c: Ceta) -> int:
    return sum((
        bool(c.body.focus),
        bool(c.mental.objects),
        c.mind.feeling != FeelingTone.NEUTRAL,
        bool(c.mind.factors),
        bool(c.action.selected),
    ))


@dataclass(frozen=True)
class ThreeCharacteristics:
    compoundness: float
    fluctuation: float
    impersonality: float


def three_characteristics(
    tr: Trace, window: Window | None = None, self_concepts: Sequence[str] = ()
) -> ThreeCharacteristics:
    cetas = window_cetas(tr, window, min_len=2)
    compound = sum(non_default_groups(c) for c in cetas) / len(cetas)
    fluct = sum(mind_change(a.mind, b.mind) for a, b in zip(cetas, cetas[1:])) / (len(cetas) - 1)
    selfing = selfing_score(tr, self_concepts, window)
    return ThreeCharacteristics(compound, fluct, 1.0 - min(1.0, max(0.0, selfing)))


@dataclass(frozen=True)
class SufferingReport:
    pain: float
    rigidity: float | None  # None for windows shorter than two ticks
    lack_events: int
    window: Window

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def suffering_report(tr: Trace, window: Window | None = None, fear_level: float = 0.5) -> SufferingReport:
    if window is None:
        window = (tr.t0, tr.t0 + len(tr))
    return SufferingReport(
        pain=pain_metric(tr, window),
        rigidity=rigidity_metric(tr, window) if window[1] - window[0] >= 2 else None,
        lack_events=lack_events(tr, window, fear_level),
        window=window,
    )


@dataclass(frozen=True)
class Classification:
    label: str
    score: float
    forced_pain: float
    baseline_pain: float


def rollout_pain(
    agent: AgentSpec,
    world: WorldSpec,
    c: Ceta,
    w: WorldState,
    horizon: int,
    seed: int,
    hooks: Sequence[Hook] = (),
) -> float:
    tr = run(agent, world, c, w, seed, horizon, hooks=hooks)
    return pain_metric(tr, (c.t + 1, c.t + 1 + horizon))


def wholesome_classify(
    action_id: str,
    c: Ceta,
    w: WorldState,
    agent: AgentSpec,
    world: WorldSpec,
    horizon: int,
    n_rollouts: int,
    seed: int,
    epsilon: float = 0.05,
    hooks: Sequence[Hook] = (),
) -> Classification:
    """Compare expected pain over the next ``horizon`` ticks when
    ``action_id`` is forced now against the agent's unforced choice.

    Rollout ``r`` uses seed ``seed + r`` for both arms of the comparison.
    """
    if horizon < 1 or n_rollouts < 1:
        raise ValueError("horizon and n_rollouts must be >= 1")
    forced_c = replace(c, action=c.action.select(action_id))
    forced = baseline = 0.0
    for r in range(n_rollouts):
        s = seed + r
        if agent.policy is not None:
            own = agent.policy(c, RandomnessSource(s).child("baseline"))
            base_c = replace(c, action=c.action.select(*own))
        else:
            base_c = c
        forced += rollout_pain(agent, world, forced_c, w, horizon, s, hooks)
        baseline += rollout_pain(agent, world, base_c, w, horizon, s, hooks)
    forced /= n_rollouts
    baseline /= n_rollouts
    score = forced - baseline
    if score > epsilon:
        label = "unwholesome"
    elif score < -epsilon:
        label = "wholesome"
    else:
        label = "neutral"
    return Classification(label, score, forced, baseline)
