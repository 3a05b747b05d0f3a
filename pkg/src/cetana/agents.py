"""Built-in agent transition rules.

All rules perceive pixels through :func:`cetana.worlds.sense`, keep the
previous attention focus while it still fits the pixel vector, and carry
mental factors forward unless the rule updates them.  Mental input is
rebuilt every tick; quotes from the previous moment do not persist.

Rules
-----
``bandit``
    Feels the consequence of its last action (reward-bandit worlds only),
    accumulates anger from pain and desire from pleasure (both decay, and
    vanish once below the presence threshold), then picks an
    action: the ``impulse`` action with probability equal to current anger,
    else a remembered pleasant arm (when memory is attached), else a draw
    from the ``policy`` weights.
``table``
    Deterministic mind: the intensity of one factor encodes a state index
    ``k / n`` and moves to ``table[k]`` every tick.  Input and action are
    left untouched.
``echo``
    Selects the menu entries (sorted) whose pixel index is lit.
``observer``
    Watches the world and never acts.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from .core import (
    BASE_FACTORS,
    PRESENCE_THRESHOLD,
    Action,
    BodyInput,
    Ceta,
    FeelingTone,
    MentalInput,
    MindState,
    WorldState,
    concept,
    image,
)
from .dynamics import AgentSpec
from .memory import AssocMemory
from .rng import RandomnessSource
from .worlds import bandit_consequence, sense

AGENT_RULES = ("bandit", "table", "echo", "observer")


def _clamp01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _settle(x: float) -> float:
    # a factor that fades below the presence threshold is gone, not lingering
    x = _clamp01(x)
    return x if x >= PRESENCE_THRESHOLD else 0.0


def _perceive(c: Ceta, w: WorldState, capacity: int) -> BodyInput:
    pixels = sense(w)
    if c.body.focus and all(i < len(pixels) for i in c.body.focus):
        focus = c.body.focus
    else:
        focus = frozenset(range(min(capacity, len(pixels))))
    return BodyInput(pixels, focus)


def _exposed(c: Ceta) -> bool:
    return any(q.content == "fluctuation" for q in c.mental.quotes())


def _carry_factors(c: Ceta, fear_on_exposure: float) -> dict[str, float]:
    factors = c.mind.factor_dict()
    if fear_on_exposure > 0 and _exposed(c):
        factors["fear"] = max(factors.get("fear", 0.0), fear_on_exposure)
    return factors


def default_focus(pixels: Sequence[int], capacity: int) -> frozenset[int]:
    return frozenset(range(min(capacity, len(pixels))))


def bandit_agent(
    menu: Sequence[str],
    *,
    policy: Mapping[str, float] | None = None,
    impulse: str | None = None,
    anger_gain: float = 0.0,
    desire_gain: float = 0.0,
    decay: float = 0.9,
    self_rate: float = 0.0,
    self_concepts: Sequence[str] = (),
    fear_on_exposure: float = 0.0,
    memory: AssocMemory | None = None,
    registry: Sequence[str] = BASE_FACTORS,
    attention_capacity: int = 8,
    action_capacity: int = 1,
    name: str = "bandit",
) -> AgentSpec:
    arms = tuple(sorted(menu))
    weights = tuple(float((policy or {}).get(a, 0.0 if policy else 1.0)) for a in arms)
    if sum(weights) <= 0:
        raise ValueError("policy weights must have a positive sum")
    if impulse is not None and impulse not in arms:
        raise ValueError(f"impulse action {impulse!r} not in menu")

    def habitual(c: Ceta, rng: RandomnessSource) -> frozenset[str]:
        if impulse is not None and rng.bernoulli(c.mind.intensity("anger")):
            return frozenset({impulse})
        return frozenset({rng.weighted(arms, weights)})

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource, mem: AssocMemory | None) -> Ceta:
        t = c.t + 1
        if w.kind == "rewardBandit":
            feeling = bandit_consequence(w, c.action.selected, rng)
        else:
            feeling = FeelingTone.NEUTRAL
        pain = max(0, -int(feeling)) / 2
        pleasure = max(0, int(feeling)) / 2
        factors = _carry_factors(c, fear_on_exposure)
        factors["anger"] = _settle(factors.get("anger", 0.0) * decay + anger_gain * pain)
        factors["desire"] = _settle(factors.get("desire", 0.0) * decay + desire_gain * pleasure)

        objects = []
        selected = None
        if mem is not None:
            for a in sorted(c.action.selected):
                mem.observe_pair(f"act:{a}", f"tone:{int(feeling)}", t)
            for a in arms:
                target = mem.recall(f"act:{a}", rng, t)
                if target is None:
                    continue
                objects.append(image(f"{a}->{target}"))
                if selected is None and int(target.split(":")[1]) > 0:
                    selected = frozenset({a})
        if impulse is not None and rng.bernoulli(c.mind.intensity("anger")):
            selected = frozenset({impulse})
        if selected is None:
            selected = frozenset({rng.weighted(arms, weights)})
        if self_rate > 0 and self_concepts and rng.bernoulli(self_rate):
            objects.extend(concept(s) for s in self_concepts)

        return Ceta(
            body=_perceive(c, w, attention_capacity),
            mental=MentalInput(objects),
            mind=MindState(feeling, factors),
            action=Action(c.action.menu, selected),
            t=t,
        )

    return AgentSpec(
        transition=transition,
        menu=frozenset(arms),
        factor_registry=frozenset(registry),
        attention_capacity=attention_capacity,
        action_capacity=action_capacity,
        memory=memory,
        policy=habitual,
        name=name,
    )


def table_index(mind: MindState, factor: str, n: int) -> int:
    return round(mind.intensity(factor) * n)


def table_mind(index: int, n: int, factor: str, base: MindState | None = None) -> MindState:
    base = base or MindState()
    return base.with_factors(**{factor: index / n})


def table_agent(
    table: Sequence[int],
    *,
    factor: str = "phase",
    menu: Sequence[str] = (),
    fear_on_exposure: float = 0.0,
    registry: Sequence[str] = BASE_FACTORS,
    attention_capacity: int = 8,
    name: str = "table",
) -> AgentSpec:
    table = tuple(int(k) for k in table)
    n = len(table)
    if n == 0 or any(not 0 <= k < n for k in table):
        raise ValueError("table entries must index into the table")

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource, mem: AssocMemory | None) -> Ceta:
        factors = _carry_factors(c, fear_on_exposure)
        k = table_index(c.mind, factor, n)
        factors[factor] = table[min(k, n - 1)] / n
        return Ceta(
            body=_perceive(c, w, attention_capacity),
            mental=MentalInput(),
            mind=MindState(c.mind.feeling, factors),
            action=c.action,
            t=c.t + 1,
        )

    return AgentSpec(
        transition=transition,
        menu=frozenset(menu),
        factor_registry=frozenset(registry) | {factor},
        attention_capacity=attention_capacity,
        action_capacity=len(menu) or 1,
        name=name,
    )


def echo_agent(
    menu: Sequence[str],
    *,
    registry: Sequence[str] = BASE_FACTORS,
    attention_capacity: int = 64,
    name: str = "echo",
) -> AgentSpec:
    ordered = tuple(sorted(menu))

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource, mem: AssocMemory | None) -> Ceta:
        body = _perceive(c, w, attention_capacity)
        lit = frozenset(ordered[k] for k, p in enumerate(body.pixels) if p and k < len(ordered))
        return Ceta(body, MentalInput(), c.mind, Action(c.action.menu, lit), c.t + 1)

    return AgentSpec(
        transition=transition,
        menu=frozenset(ordered),
        factor_registry=frozenset(registry),
        attention_capacity=attention_capacity,
        action_capacity=len(ordered),
        name=name,
    )


def observer_agent(
    *,
    fear_on_exposure: float = 0.0,
    registry: Sequence[str] = BASE_FACTORS,
    attention_capacity: int = 8,
    name: str = "observer",
) -> AgentSpec:
    def transition(c: Ceta, w: WorldState, rng: RandomnessSource, mem: AssocMemory | None) -> Ceta:
        return Ceta(
            body=_perceive(c, w, attention_capacity),
            mental=MentalInput(),
            mind=MindState(FeelingTone.NEUTRAL, _carry_factors(c, fear_on_exposure)),
            action=Action(c.action.menu),
            t=c.t + 1,
        )

    return AgentSpec(
        transition=transition,
        factor_registry=frozenset(registry),
        attention_capacity=attention_capacity,
        name=name,
    )


def initial_ceta(
    agent: AgentSpec,
    w0: WorldState,
    *,
    t0: int = 0,
    feeling: int = 0,
    factors: Mapping[str, float] | None = None,
    selected: Sequence[str] = (),
    focus: Sequence[int] | None = None,
) -> Ceta:
    pixels = sense(w0)
    body = BodyInput(
        pixels,
        frozenset(focus) if focus is not None else default_focus(pixels, agent.attention_capacity),
    )
    return Ceta(
        body=body,
        mental=MentalInput(),
        mind=MindState(FeelingTone(feeling), factors or {}),
        action=Action(agent.menu, frozenset(selected)),
        t=t0,
    )

