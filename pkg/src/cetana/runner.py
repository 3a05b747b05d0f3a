"""Turn a :class:`~cetana.scenario.Scenario` into specs, run it, and build
the JSON report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import metrics as M
from .agents import bandit_agent, echo_agent, initial_ceta, observer_agent, table_agent
from .contemplative import (
    ConcentrationConfig,
    LoopReport,
    ResetEvent,
    awareness_from_trace,
    clamp,
    concentration_hook,
    detect_loop,
    nibbana_reset,
    resume_after_reset,
)
from .core import Action, BodyInput, MentalInput, Trace, parse_mental_item, substream
from .dynamics import AgentSpec, Hook, WorldSpec, run
from .memory import AssocMemory
from .mindfulness import MindfulnessConfig, classify_layer, mindfulness_hook, training_mask
from .scenario import Scenario
from .tracefile import BASE_COLUMNS, row_for
from .worlds import builtin_world


def build_world(s: Scenario) -> WorldSpec:
    if s.world.kind == "grid":
        return builtin_world("grid", width=s.world.width, height=s.world.height, density=s.world.density)
    return builtin_world(s.world.kind, arms=s.arms)


def build_agent(s: Scenario) -> AgentSpec:
    a = s.agent
    registry = s.registry
    if s.rule == "bandit":
        memory = None
        if s.memory.enabled:
            memory = AssocMemory(s.memory.capacity, s.memory.reliability, s.memory.threshold)
        return bandit_agent(
            s.menu,
            policy=dict(a.policy) or None,
            impulse=a.impulse,
            anger_gain=a.anger_gain,
            desire_gain=a.desire_gain,
            decay=a.decay,
            self_rate=a.self_rate,
            self_concepts=s.metrics.self_concepts,
            fear_on_exposure=a.fear_on_exposure,
            memory=memory,
            registry=registry,
            attention_capacity=a.attention,
            action_capacity=a.action_attention,
        )
    if s.rule == "table":
        return table_agent(
            a.table, factor=a.table_factor, menu=s.menu, fear_on_exposure=a.fear_on_exposure,
            registry=registry, attention_capacity=a.attention,
        )
    if s.rule == "echo":
        return echo_agent(s.menu, registry=registry, attention_capacity=a.attention)
    return observer_agent(fear_on_exposure=a.fear_on_exposure, registry=registry, attention_capacity=a.attention)


def mindfulness_config(s: Scenario) -> MindfulnessConfig:
    m = s.mindfulness
    return MindfulnessConfig(
        enabled=m.enabled, strength=m.strength, sharpness=m.sharpness, rest=m.rest, right=m.right,
        rho=m.rho, equanimity_floor=m.equanimity_floor, quote_focus=m.quote_focus, insight=m.insight,
    )


def concentration_config(s: Scenario, agent: AgentSpec) -> ConcentrationConfig:
    c = s.concentration
    return ConcentrationConfig(
        body=BodyInput(c.pixels, frozenset(c.focus)),
        mental=MentalInput(parse_mental_item(k) for k in c.mental),
        action=Action(agent.menu, frozenset(c.action)),
        start_tick=c.start,
        drift_rate=c.drift,
        recovery=c.recovery,
    )


@dataclass
class Simulation:
    scenario: Scenario
    agent: AgentSpec
    world: WorldSpec
    trace: Trace
    hooks: list[Hook] = field(default_factory=list)
    mask: list[bool] = field(default_factory=list)
    loop: LoopReport | None = None
    reset: ResetEvent | None = None


def simulate(s: Scenario) -> Simulation:
    world = build_world(s)
    agent = build_agent(s)
    w0 = world.initial_state(s.seed)
    c0 = initial_ceta(
        agent, w0, t0=s.t0, feeling=s.agent.feeling, factors=dict(s.agent.initial), focus=s.agent.focus,
    )
    mcfg = mindfulness_config(s)
    mask = training_mask(mcfg, s.steps + 1, s.mindfulness.start) if s.mindfulness.enabled else []
    hooks: list[Hook] = []
    if s.concentration.enabled:
        # clamp before mindfulness, so quotes land on top of the clamped input
        ccfg = concentration_config(s, agent)
        hooks.append(concentration_hook(ccfg))
        if c0.t >= ccfg.start_tick:
            c0 = clamp(c0, ccfg)
    if mask:
        hooks.append(mindfulness_hook(mask, mcfg, s.t0))
    trace = run(agent, world, c0, w0, s.seed, s.steps, hooks=hooks, scenario_id=s.id)

    loop = detect_loop(substream(trace, "mindState"))
    event = None
    if s.reset.enabled and loop is not None:
        event = nibbana_reset(trace, loop, awareness_from_trace(trace), s.reset.cycles, s.reset.coverage)
        if event is not None:
            trace = resume_after_reset(agent, world, trace, event, hooks=hooks)
    return Simulation(s, agent, world, trace, hooks, mask, loop, event)


def layer_columns(sim: Simulation) -> dict[str, list[str]]:
    tr = sim.trace
    cols = {}
    for obj in sim.scenario.metrics.track:
        values = []
        for c in tr.cetas:
            if c.t + 1 < tr.t0 + len(tr):
                values.append(classify_layer(tr, obj, c.t).value)
            else:
                values.append("")
        cols[f"layer:{obj}"] = values
    return cols


def metric_columns(tr: Trace, fear_level: float = 0.5) -> dict[str, list[str]]:
    cetas = tr.cetas
    return {
        "pain": [str(M.pain(c.feeling)) for c in cetas],
        "lack": ["1" if M.is_lack_tick(c, fear_level) else "0" for c in cetas],
    }


def build_report(sim: Simulation) -> dict:
    s = sim.scenario
    tr = sim.trace
    mt = s.metrics
    window = mt.window or (tr.t0, tr.t0 + len(tr))
    report: dict = {
        "scenario": s.id,
        "seed": s.seed,
        "steps": len(tr) - 1,
        "t0": tr.t0,
        "suffering": M.suffering_report(tr, window, mt.fear_level).to_dict(),
        "selfing": M.selfing_score(tr, mt.self_concepts, window),
        "mindfulnessApplications": sum(sim.mask),
        "loop": None,
        "reset": None,
    }
    if window[1] - window[0] >= 2:
        tc = M.three_characteristics(tr, window, mt.self_concepts)
        report["threeCharacteristics"] = {
            "compoundness": tc.compoundness,
            "fluctuation": tc.fluctuation,
            "impersonality": tc.impersonality,
        }
    else:
        report["threeCharacteristics"] = None
    if sim.loop is not None:
        report["loop"] = {"start": tr.t0 + sim.loop.start, "period": sim.loop.period}
    if sim.reset is not None:
        report["reset"] = {
            "resetTick": sim.reset.tick,
            "start": tr.t0 + sim.reset.loop.start,
            "period": sim.reset.loop.period,
            "cycles": sim.reset.cycles,
        }
    c, w = tr.entries[window[0] - tr.t0]
    table = []
    for action_id in sorted(sim.agent.menu):
        cls = M.wholesome_classify(
            action_id, c, w, sim.agent, sim.world, mt.horizon, mt.rollouts, s.seed, mt.epsilon, sim.hooks,
        )
        table.append({"action": action_id, "label": cls.label, "score": cls.score})
    report["wholesomeness"] = table
    return report


def trace_columns(sim: Simulation) -> dict[str, list[str]]:
    cols = layer_columns(sim)
    wanted = sim.scenario.metrics.columns
    if wanted:
        available = metric_columns(sim.trace, sim.scenario.metrics.fear_level)
        cols.update((name, available[name]) for name in wanted)
    return cols


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    tick: int | None = None
    reason: str = ""


def replay_verify(rows: list[list[str]], header: list[str], s: Scenario) -> ReplayResult:
    """Regenerate ``s`` for as many ticks as ``rows`` hold and compare row by row.

    ``rows`` are raw CSV rows under ``header``; the first differing row is
    reported by its regenerated tick.
    """
    if not rows:
        return ReplayResult(False, None, "trace file has no rows")
    sim = simulate(replace(s, steps=len(rows) - 1))
    extra = trace_columns(sim)
    expected_header = [*BASE_COLUMNS, *extra]
    if header != expected_header:
        return ReplayResult(False, None, f"column mismatch: {header} vs {expected_header}")
    for k, ((c, w), got) in enumerate(zip(sim.trace.entries, rows)):
        want = [*row_for(c, w), *(col[k] for col in extra.values())]
        if got != want:
            diff = [h for h, a, b in zip(header, got, want) if a != b]
            return ReplayResult(False, c.t, f"differs in {', '.join(diff)}")
    return ReplayResult(True)
