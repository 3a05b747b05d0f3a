from dataclasses import replace
from pathlib import Path

import pytest

from cetana.agents import bandit_agent, initial_ceta, observer_agent
from cetana.core import Action, BodyInput, Ceta, MindState, WorldState
from cetana.dynamics import AgentSpec, WorldSpec, run, step, tick_source
from cetana.errors import RegistryMismatch, StepError, UnknownWorldKind
from cetana.runner import simulate
from cetana.scenario import parse_scenario
from cetana.tracefile import render_trace
from cetana.worlds import builtin_world, grid_world, life_step, reward_bandit

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def constant_agent():
    return AgentSpec(lambda c, w, rng, mem: c.at(c.t + 1))


def constant_world():
    return WorldSpec(lambda c, w, rng: w, "still", lambda rng: WorldState("still", (1,)))


def test_fixed_point():
    c0 = Ceta(BodyInput((1,)), t=0)
    w0 = WorldState("still", (1,))
    tr = run(constant_agent(), constant_world(), c0, w0, 1, 5)
    assert all(c.at(0) == c0 and w == w0 for c, w in tr.entries)


def test_zero_steps():
    tr = run(constant_agent(), constant_world(), Ceta(), WorldState("still"), 1, 0)
    assert len(tr) == 1


def test_negative_steps_rejected():
    with pytest.raises(ValueError):
        run(constant_agent(), constant_world(), Ceta(), WorldState("still"), 1, -1)


def test_grid_with_null_agent_is_pure_life():
    world = grid_world(5, 5, 0.4)
    agent = observer_agent()
    w0 = world.initial_state(8)
    tr = run(agent, world, initial_ceta(agent, w0), w0, 8, 6)
    cells = w0.cells[2]
    for w in tr.worlds[1:]:
        cells = life_step(cells, 5, 5)
        assert w.cells[2] == cells
    assert all(not c.action.selected for c in tr.cetas)


def test_blinker_oscillates():
    row = (0, 0, 0, 0, 0)
    cells = row * 2 + (0, 1, 1, 1, 0) + row * 2
    once = life_step(cells, 5, 5)
    assert once != cells and life_step(once, 5, 5) == cells


def test_grid_poke():
    world = grid_world(3, 3, 0.0)
    w0 = world.initial_state(0)
    c = Ceta(action=Action(frozenset({"poke.4"}), frozenset({"poke.4"})))
    assert world.transition(c, w0, tick_source(0, 0)).cells[2][4] == 1


def test_pavlov_reruns_identically():
    s = parse_scenario((SCENARIOS / "pavlov.scn").read_text())
    assert s.seed == 42 and s.steps == 100
    assert render_trace(simulate(s).trace) == render_trace(simulate(s).trace)


def test_prefix_and_continuation():
    s = parse_scenario((SCENARIOS / "anger_bandit.scn").read_text())
    sim = simulate(replace(s, steps=60))
    full = sim.trace
    short = simulate(replace(s, steps=25)).trace
    assert full.prefix(26) == short
    c, w = short.entries[-1]
    rest = run(sim.agent, sim.world, c, w, s.seed, 35)
    assert short.entries + rest.entries[1:] == full.entries


def test_deterministic_reward_arrives_next_tick():
    agent = bandit_agent(["a1", "a2"], policy={"a1": 1.0})
    world = reward_bandit()
    w0 = world.initial_state(0)
    c0 = initial_ceta(agent, w0, selected=["a1"])
    tr = run(agent, world, c0, w0, 0, 3)
    assert [int(c.feeling) for c in tr.cetas] == [0, 1, 1, 1]


def test_mixed_reward_mean():
    arms = {"a": ((1, 0.5), (-1, 0.5)), "b": ((2, 1.0),)}
    agent = bandit_agent(["a", "b"], policy={"a": 1.0})
    world = reward_bandit(arms)
    w0 = world.initial_state(3)
    tr = run(agent, world, initial_ceta(agent, w0, selected=["a"]), w0, 3, 10_000)
    mean = sum(int(c.feeling) for c in tr.cetas[1:]) / 10_000
    assert abs(mean - 0.0) <= 0.05


def test_simultaneous_read():
    s = parse_scenario((SCENARIOS / "anger_bandit.scn").read_text())
    sim = simulate(replace(s, steps=20))
    for c, w in sim.trace.entries[:-1]:
        rng = tick_source(s.seed, c.t)
        forward = step(c, w, rng.clone(), sim.agent, sim.world)
        # world first, from the same pre-step pair and pre-split streams
        r = rng.clone()
        agent_rng, world_rng = r.spawn(), r.spawn()
        w_next = sim.world.transition(c, w, world_rng)
        c_next = sim.agent.transition(c, w, agent_rng, None)
        assert forward == (c_next, w_next)


def test_transition_purity():
    s = parse_scenario((SCENARIOS / "anger_bandit.scn").read_text())
    sim = simulate(replace(s, steps=10))
    c, w = sim.trace.entries[4]
    rng = tick_source(s.seed, c.t)
    assert step(c, w, rng.clone(), sim.agent, sim.world) == step(c, w, rng.clone(), sim.agent, sim.world)


def test_registry_mismatch_and_step_error():
    agent = bandit_agent(["a1", "a2"])
    world = reward_bandit()
    w0 = world.initial_state(0)
    bad = replace(initial_ceta(agent, w0), mind=MindState(factors={"glee": 0.5}))
    with pytest.raises(RegistryMismatch):
        step(bad, w0, tick_source(0, 0), agent, world)
    with pytest.raises(StepError) as err:
        run(agent, world, bad.at(7), w0, 0, 3)
    assert err.value.tick == 7


def test_unknown_world_kind():
    with pytest.raises(UnknownWorldKind):
        builtin_world("ocean")
