from dataclasses import replace

import pytest

from cetana.agents import bandit_agent, echo_agent
from cetana.composition import Encoder, compose_agents
from cetana.core import Action, BodyInput, Ceta, MindState
from cetana.errors import EncoderMismatch
from cetana.tracefile import render_trace


def talker(name):
    return bandit_agent(["hi", "lo"], policy={"hi": 0.5, "lo": 0.5}, name=name)


def start(agent, width=2):
    return Ceta(BodyInput((0,) * width), action=Action(agent.menu), t=0)


ENC = {"hi": 0, "lo": 1}


def test_clone_symmetry():
    a, b = talker("x"), talker("x")
    tr_a, tr_b = compose_agents(a, b, ENC, ENC).run(start(a), start(b), 4, 4, 30)
    assert tr_a.entries == tr_b.entries


def test_role_swap():
    a, b = talker("a"), talker("b")
    tr_a, tr_b = compose_agents(a, b, ENC, ENC).run(start(a), start(b), 4, 9, 30)
    sw_b, sw_a = compose_agents(b, a, ENC, ENC).run(start(b), start(a), 9, 4, 30)
    assert render_trace(tr_a) == render_trace(sw_a)
    assert render_trace(tr_b) == render_trace(sw_b)


def test_composed_determinism():
    a, b = talker("a"), echo_agent(["p", "q"])
    system = compose_agents(a, b, {"hi": 0, "lo": 1}, {"p": 0, "q": 1})
    one = system.run(start(a), start(b), 1, 2, 25, run_id="r")
    two = system.run(start(a), start(b), 1, 2, 25, run_id="r")
    assert one == two
    assert one[0].scenario_id == one[1].scenario_id == "r"


def test_no_hidden_channel():
    a, b = talker("a"), echo_agent(["p", "q"])
    system = compose_agents(a, b, {"hi": 0, "lo": 1}, {"p": 0, "q": 1})
    base = start(b)
    noisy = replace(base, mind=MindState(factors={"fear": 0.9, "anger": 0.3}))
    tr_a, _ = system.run(start(a), base, 3, 5, 25)
    tr_a2, _ = system.run(start(a), noisy, 3, 5, 25)
    assert [c for c in tr_a.cetas] == [c for c in tr_a2.cetas]


def test_encoder_mismatch():
    a, b = talker("a"), talker("b")
    with pytest.raises(EncoderMismatch):
        compose_agents(a, b, {"hi": 0}, ENC)
    with pytest.raises(EncoderMismatch):
        Encoder.for_menu({"hi": 3}, frozenset({"hi"}), width=2)
    enc = Encoder.for_menu(ENC, frozenset(ENC))
    assert enc(Action(frozenset(ENC), frozenset({"lo"}))) == (0, 1)
    with pytest.raises(EncoderMismatch):
        enc(Action(frozenset({"zz"}), frozenset({"zz"})))
