import pytest
from hypothesis import given
from hypothesis import strategies as st

from cetana.core import BodyInput, Ceta, FeelingTone, MentalInput, MindState, QuotedObject, Trace, WorldState
from cetana.errors import CapacityExceeded, IndexOutOfTrace, OutOfRange, TimeMismatch
from cetana.mindfulness import (
    Layer,
    MindfulnessConfig,
    apply_mindfulness,
    classify_layer,
    scheduled_count,
    set_focus,
    training_mask,
)

from .strategies import cetas, factor_maps

CFG = MindfulnessConfig()


def pair(prev_factors, next_factors=None, t=3):
    prev = Ceta(mind=MindState(FeelingTone.UNPLEASANT, prev_factors), t=t)
    nxt = Ceta(mind=MindState(FeelingTone.UNPLEASANT, prev_factors if next_factors is None else next_factors), t=t + 1)
    return prev, nxt


def test_angry_moment_is_seen():
    prev, nxt = pair({"anger": 0.8})
    out = apply_mindfulness(prev, nxt, CFG)
    assert QuotedObject(3, "factor:anger") in out.mental.objects
    assert out.mind.intensity("anger") <= 0.4
    assert out.mind.intensity("equanimity") >= 0.5
    assert out.mind.present("mindfulness")


def test_nothing_to_regulate_quotes_the_mind():
    prev, nxt = pair({"compassion": 0.3, "anger": 0.01})
    out = apply_mindfulness(prev, nxt, CFG)
    assert out.mental.keys() == ["quote@3:mind"]
    assert out.mind.intensity("compassion") == 0.3 and out.mind.intensity("anger") == 0.01


def test_repeated_application_closed_form():
    c0 = Ceta(mind=MindState(factors={"anger": 0.8}), t=0)
    c1 = apply_mindfulness(c0, Ceta(mind=MindState(factors={"anger": 0.8}), t=1), CFG)
    c2 = apply_mindfulness(c1, Ceta(mind=c1.mind, t=2), CFG)
    assert c2.mind.intensity("anger") == pytest.approx(0.8 * 0.5**2, abs=1e-15)


def test_time_mismatch():
    prev, _ = pair({"anger": 0.5})
    with pytest.raises(TimeMismatch):
        apply_mindfulness(prev, prev, CFG)


def test_tie_breaks_lexicographically():
    prev, nxt = pair({"fear": 0.6, "anger": 0.6})
    assert QuotedObject(3, "factor:anger") in apply_mindfulness(prev, nxt, CFG).mental.objects


def test_right_mindfulness_adds_friendliness():
    prev, nxt = pair({"anger": 0.5})
    assert apply_mindfulness(prev, nxt, MindfulnessConfig(right=True)).mind.intensity("friendliness") >= 0.5
    assert apply_mindfulness(prev, nxt, CFG).mind.intensity("friendliness") == 0.0


def test_insight_and_focus_quotes():
    prev = Ceta(BodyInput((4, 5), frozenset({1})), mind=MindState(factors={"fear": 0.2}), t=0)
    nxt = Ceta(BodyInput((4, 5), frozenset({1})), mind=MindState(factors={"fear": 0.3}), t=1)
    out = apply_mindfulness(prev, nxt, MindfulnessConfig(quote_focus=True, insight=True))
    assert {"quote@0:object:5", "quote@0:fluctuation"} <= set(out.mental.keys())


@given(factor_maps, factor_maps)
def test_regulation_is_monotone_and_idempotent(a, b):
    prev, nxt = pair(a, b)
    once = apply_mindfulness(prev, nxt, CFG)
    for name in CFG.unwholesome:
        assert once.mind.intensity(name) <= nxt.mind.intensity(name)
    assert once.mind.intensity("equanimity") >= nxt.mind.intensity("equanimity")
    twice = apply_mindfulness(prev, once, CFG)
    assert set(twice.mental.quotes()) == set(once.mental.quotes())


def test_mask_examples():
    assert training_mask(MindfulnessConfig(), 7) == [True] * 7
    mask = training_mask(MindfulnessConfig(sharpness=3), 9)
    assert [k for k, on in enumerate(mask) if on] == [0, 3, 6]
    mask = training_mask(MindfulnessConfig(strength=2, rest=1), 7)
    assert mask == [True, True, False, True, True, False, True]
    assert not any(training_mask(MindfulnessConfig(enabled=False), 5))


@given(
    st.integers(1, 5), st.one_of(st.none(), st.integers(0, 6)), st.integers(0, 4), st.integers(0, 60),
    st.integers(0, 10),
)
def test_mask_count_closed_form(sharpness, strength, rest, n, start):
    cfg = MindfulnessConfig(sharpness=sharpness, strength=strength, rest=rest)
    assert sum(training_mask(cfg, n, start)) == scheduled_count(cfg, n, start)


def test_set_focus():
    c = Ceta(BodyInput((1, 2, 3, 4, 5)))
    assert set_focus(c, []).body.focus == frozenset()
    assert set_focus(c, range(5), attention_capacity=5).body.focus == frozenset(range(5))
    with pytest.raises(CapacityExceeded):
        set_focus(c, range(5), attention_capacity=4)
    with pytest.raises(OutOfRange):
        set_focus(c, [5])


def layer_trace(pixels, focus, next_objects=(), mindful=False):
    w = WorldState("none")
    c0 = Ceta(BodyInput(pixels, frozenset(focus)), t=0)
    c1 = Ceta(mental=MentalInput(next_objects), mind=MindState(factors={"mindfulness": 1.0} if mindful else {}), t=1)
    return Trace(((c0, w), (c1, w)))


def test_layers():
    assert classify_layer(layer_trace((1, 2), {0}), 9, 0) is Layer.NOT_PRESENT
    assert classify_layer(layer_trace((1, 2), {0}), 2, 0) is Layer.PRE
    assert classify_layer(layer_trace((1, 2), {1}), 2, 0) is Layer.PROTO
    quoted = layer_trace((1, 2), {1}, [QuotedObject(0, "object:2")], mindful=True)
    assert classify_layer(quoted, 2, 0) is Layer.FULL
    with pytest.raises(IndexOutOfTrace):
        classify_layer(quoted, 2, 1)


@given(cetas())
def test_mindfulness_always_marks_presence(c):
    out = apply_mindfulness(c.at(c.t - 1), c, CFG)
    assert out.mind.present("mindfulness")
    assert all(q.source < out.t for q in out.mental.quotes())
