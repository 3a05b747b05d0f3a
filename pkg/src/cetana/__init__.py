"""Discrete-time simulator for coupled agent/world streams of mind-moments."""

from .composition import ComposedSystem, Encoder, compose_agents, wrap_as_world
from .contemplative import (
    ConcentrationConfig,
    LoopReport,
    ResetEvent,
    concentrate_run,
    detect_loop,
    nibbana_reset,
    resume_after_reset,
)
from .core import (
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
    decompose_ceta,
    recompose_ceta,
    substream,
)
from .dynamics import AgentSpec, WorldSpec, run, step
from .memory import AssocMemory
from .metrics import (
    lack_events,
    pain_metric,
    rigidity_metric,
    selfing_score,
    suffering_report,
    three_characteristics,
    wholesome_classify,
)
from .mindfulness import Layer, MindfulnessConfig, apply_mindfulness, classify_layer, set_focus, training_mask
from .rng import RandomnessSource
from .scenario import Scenario, parse_scenario, serialize_scenario
from .worlds import builtin_world

__version__ = "0.1.0"

__all__ = [
    "Action", "AgentSpec", "AssocMemory", "BodyInput", "Ceta", "ComposedSystem", "ConcentrationConfig",
    "Encoder", "FeelingTone", "Layer", "LoopReport", "MentalInput", "MentalObject", "MindState",
    "MindfulnessConfig", "QuotedObject", "RandomnessSource", "ResetEvent", "Scenario", "Trace",
    "WorldSpec", "WorldState", "apply_mindfulness", "builtin_world", "classify_layer", "compose_agents",
    "concentrate_run", "decompose_ceta", "detect_loop", "lack_events", "nibbana_reset", "pain_metric",
    "parse_scenario", "recompose_ceta", "resume_after_reset", "rigidity_metric", "run", "selfing_score",
    "serialize_scenario", "set_focus", "step", "substream", "suffering_report", "three_characteristics",
    "training_mask", "wholesome_classify", "wrap_as_world",
]
