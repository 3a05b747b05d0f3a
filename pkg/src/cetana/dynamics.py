"""Coupled agent/world stepping and the run loop.

One tick computes ``c' = A(c, w)`` and ``w' = W(c, w)`` from the same
pre-step pair.  Randomness is explicit: the run owns a per-tick source
keyed by the absolute tick, from which the agent's stream is spawned first,
then the world's, then one stream per post-step hook.  Because every stream
is fixed before either transition runs, evaluation order cannot leak into
the result.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

from .core import BASE_FACTORS, Ceta, Trace, WorldState
from .errors import RegistryMismatch, StepError
from .memory import AssocMemory
from .rng import RandomnessSource

AgentTransition = Callable[[Ceta, WorldState, RandomnessSource, "AssocMemory | None"], Ceta]
WorldTransition = Callable[[Ceta, WorldState, RandomnessSource], WorldState]
Policy = Callable[[Ceta, RandomnessSource], frozenset]
# (pre-step ceta, post-step ceta, post-step world, hook rng) -> adjusted ceta
Hook = Callable[[Ceta, Ceta, WorldState, RandomnessSource], Ceta]


@dataclass(frozen=True)
class AgentSpec:
    transition: AgentTransition
    menu: frozenset[str] = frozenset()
    factor_registry: frozenset[str] = frozenset(BASE_FACTORS)
    attention_capacity: int = 8
    action_capacity: int = 1
    memory: AssocMemory | None = field(default=None, compare=False)
    # action choice the agent would make unforced; used as the baseline
    # when judging whether a forced action is wholesome
    policy: Policy | None = None
    name: str = "agent"

    def check(self, c: Ceta) -> None:
        unknown = {name for name, _ in c.mind.factors} - self.factor_registry
        if unknown:
            raise RegistryMismatch(f"factors {sorted(unknown)} not in {self.name}'s registry")
        stray = c.action.menu - self.menu
        if stray:
            raise RegistryMismatch(f"actions {sorted(stray)} not in {self.name}'s menu")


@dataclass(frozen=True)
class WorldSpec:
    transition: WorldTransition
    kind: str
    initial: Callable[[RandomnessSource], WorldState]

    def initial_state(self, seed: int) -> WorldState:
        return self.initial(RandomnessSource(seed).child("init"))


def tick_source(seed: int, t: int) -> RandomnessSource:
    return RandomnessSource(seed).child(t)


def step(
    c: Ceta,
    w: WorldState,
    rng: RandomnessSource,
    agent: AgentSpec,
    world: WorldSpec,
    memory: AssocMemory | None = None,
) -> tuple[Ceta, WorldState]:
    agent.check(c)
    agent_rng = rng.spawn()
    world_rng = rng.spawn()
    c_next = agent.transition(c, w, agent_rng, memory)
    w_next = world.transition(c, w, world_rng)
    if c_next.t != c.t + 1:
        c_next = c_next.at(c.t + 1)
    agent.check(c_next)
    return c_next, w_next


def run(
    agent: AgentSpec,
    world: WorldSpec,
    c0: Ceta,
    w0: WorldState,
    seed: int,
    n_steps: int,
    *,
    hooks: Sequence[Hook] = (),
    memory: AssocMemory | None = None,
    scenario_id: str = "",
) -> Trace:
    """Run ``n_steps`` ticks from ``(c0, w0)``; the trace has ``n_steps + 1`` entries.

    ``memory`` overrides the agent's memory template. Either way the run
    works on a private copy, so repeated runs start from the same store.
    """
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    template = memory if memory is not None else agent.memory
    mem = template.copy() if template is not None else None
    entries = [(c0, w0)]
    c, w = c0, w0
    for _ in range(n_steps):
        try:
            rng = tick_source(seed, c.t)
            c_next, w_next = step(c, w, rng, agent, world, mem)
            for hook in hooks:
                c_next = hook(c, c_next, w_next, rng.spawn())
        except StepError:
            raise
        except Exception as exc:
            raise StepError(c.t, exc) from exc
        entries.append((c_next, w_next))
        c, w = c_next, w_next
    return Trace(tuple(entries), t0=c0.t, seed=seed, scenario_id=scenario_id, memory=mem)
