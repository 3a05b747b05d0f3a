import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cetana.core import (
    Action,
    BodyInput,
    Ceta,
    FeelingTone,
    MentalInput,
    MentalObject,
    MindState,
    QuotedObject,
    Trace,
    WorldState,
    canonical_json,
    ceta_from_dict,
    ceta_to_dict,
    concept,
    decompose_ceta,
    parse_mental_item,
    recompose_ceta,
    substream,
    world_from_dict,
    world_to_dict,
)

from .strategies import cetas, mind_states


def test_feeling_scale_is_five_ordered_levels():
    tones = list(FeelingTone)
    assert [int(f) for f in tones] == [-2, -1, 0, 1, 2]
    assert tones == sorted(tones)


def test_mind_state_rejects_out_of_range():
    with pytest.raises(ValueError):
        MindState(factors={"anger": 1.5})
    with pytest.raises(ValueError):
        MindState(factors={"anger": -0.1})


def test_zero_intensity_equals_absence():
    assert MindState(factors={"anger": 0.0}) == MindState()
    assert hash(MindState(factors={"fear": 0.3, "anger": 0.0})) == hash(MindState(factors={"fear": 0.3}))


def test_presence_threshold():
    m = MindState(factors={"fear": 0.05, "anger": 0.049})
    assert m.present("fear") and not m.present("anger")


def test_decompose_order_and_empty_mental():
    c = Ceta(BodyInput((1, 2), frozenset({0})), MentalInput(), MindState(FeelingTone.PLEASANT, {"desire": 0.4}),
             Action(frozenset({"a"}), frozenset({"a"})), 5)
    body, mental, feeling, factors, action = decompose_ceta(c)
    assert body.pixels == (1, 2)
    assert mental.objects == frozenset()
    assert feeling is FeelingTone.PLEASANT
    assert factors == (("desire", 0.4),)
    assert action.selected == {"a"}


def test_invariant_violations_raise():
    with pytest.raises(ValueError):
        BodyInput((0, 1), frozenset({2}))
    with pytest.raises(ValueError):
        Action(frozenset({"a"}), frozenset({"b"}))
    with pytest.raises(ValueError):
        MentalObject("dream", "x")


def test_mental_objects_carry_origin_tags():
    assert concept("self").origin == "mental"
    assert QuotedObject(3, "mind").key() == "quote@3:mind"
    assert parse_mental_item("quote@-2:factor:anger") == QuotedObject(-2, "factor:anger")
    assert parse_mental_item("image:bell->tone:2") == MentalObject("image", "bell->tone:2")


def _trace(n, t0=0):
    w = WorldState("none")
    return Trace(tuple((Ceta(mind=MindState(FeelingTone(k % 5 - 2)), t=t0 + k), w) for k in range(n)), t0=t0)


def test_trace_contiguity():
    with pytest.raises(ValueError):
        Trace(((Ceta(t=0), WorldState("x")), (Ceta(t=2), WorldState("x"))))
    tr = _trace(4, t0=-3)
    assert tr.ceta_at(-1).t == -1
    with pytest.raises(IndexError):
        tr.ceta_at(1)


def test_substream():
    tr = _trace(3)
    assert substream(tr, "feeling") == [FeelingTone(-2), FeelingTone(-1), FeelingTone(0)]
    assert substream(tr, "mindState") == [c.mind for c in tr.cetas]
    assert substream(Trace(()), "feeling") == []
    with pytest.raises(ValueError):
        substream(tr, "soul")


@settings(max_examples=200, deadline=None)
@given(cetas())
def test_ceta_json_round_trip(c):
    text = canonical_json(c)
    assert ceta_from_dict(json.loads(text)) == c
    assert canonical_json(ceta_from_dict(json.loads(text))) == text


@settings(max_examples=100, deadline=None)
@given(cetas(), st.lists(st.integers(0, 1), max_size=5))
def test_world_json_round_trip_with_nested_ceta(c, pixels):
    w = WorldState("agent:b", (c, tuple(pixels)))
    assert world_from_dict(json.loads(canonical_json(w))) == w
    assert world_to_dict(w)["kind"] == "agent:b"


@given(mind_states, mind_states)
def test_equal_values_hash_equally(a, b):
    if a == b:
        assert hash(a) == hash(b)
    assert (ceta_to_dict(Ceta(mind=a)) == ceta_to_dict(Ceta(mind=b))) == (a == b)


@given(cetas())
def test_recompose_keeps_time(c):
    assert recompose_ceta(decompose_ceta(c), c.t + 1) == c.at(c.t + 1)
