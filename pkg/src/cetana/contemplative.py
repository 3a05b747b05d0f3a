"""Concentration (clamped input and action), mind-state loops, and the reset
that lets a stream escape such a loop."""

from __future__ import annotations

from collections.abc import Hashable, Sequence
from dataclasses import dataclass, replace

import numpy as np

from .core import Action, BodyInput, Ceta, FeelingTone, MentalInput, MindState, Trace, WorldState, substream
from .dynamics import AgentSpec, Hook, WorldSpec, run
from .errors import LoopMismatch
from .memory import AssocMemory
from .rng import RandomnessSource


@dataclass(frozen=True)
class ConcentrationConfig:
    body: BodyInput
    mental: MentalInput
    action: Action
    start_tick: int = 0
    drift_rate: float = 0.0
    recovery: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.drift_rate <= 1.0:
            raise ValueError("drift_rate must lie in [0, 1]")


def is_clamped(c: Ceta, cfg: ConcentrationConfig) -> bool:
    # quotes added by mindfulness sit on top of the clamped input
    return c.body == cfg.body and c.mental.unquoted() == cfg.mental and c.action == cfg.action


def clamp(c: Ceta, cfg: ConcentrationConfig) -> Ceta:
    return replace(c, body=cfg.body, mental=cfg.mental, action=cfg.action)


def concentration_hook(cfg: ConcentrationConfig) -> Hook:
    """Clamp every tick from ``start_tick`` on, except drift ticks.

    On a drift tick attention leaves the object: the agent's own input is
    kept with an empty focus. With ``recovery`` the next tick clamps again;
    without it the drift persists for the rest of the run.
    """

    def hook(c_prev: Ceta, c_next: Ceta, w_next: WorldState, rng: RandomnessSource) -> Ceta:
        if c_next.t < cfg.start_tick:
            return c_next
        drifting = not cfg.recovery and c_prev.t >= cfg.start_tick and not is_clamped(c_prev, cfg)
        if drifting or rng.bernoulli(cfg.drift_rate):
            return replace(
                c_next,
                body=BodyInput(c_next.body.pixels, frozenset()),
                action=cfg.action,
            )
        return clamp(c_next, cfg)

    return hook


def concentrate_run(
    agent: AgentSpec,
    world: WorldSpec,
    c0: Ceta,
    w0: WorldState,
    seed: int,
    n_steps: int,
    cfg: ConcentrationConfig,
    *,
    hooks: Sequence[Hook] = (),
    memory: AssocMemory | None = None,
    scenario_id: str = "",
) -> Trace:
    if c0.t >= cfg.start_tick:
        c0 = clamp(c0, cfg)
    return run(
        agent, world, c0, w0, seed, n_steps,
        hooks=[concentration_hook(cfg), *hooks],
        memory=memory,
        scenario_id=scenario_id,
    )


@dataclass(frozen=True)
class LoopReport:
    """``stream[start + period] == stream[start]`` and the tail repeats with ``period``.

    ``start`` is a position in the analysed stream, not an absolute tick.
    """

    start: int
    period: int
    witness: Hashable
    states: tuple = ()


def _periodic_from(ids: np.ndarray, start: int, period: int) -> bool:
    return bool(np.array_equal(ids[start:len(ids) - period], ids[start + period:]))


def detect_loop(stream: Sequence[Hashable]) -> LoopReport | None:
    """Earliest ``(start, period)`` from which ``stream`` repeats with ``period``.

    The first repeated value gives the answer for any stream produced by a
    deterministic map. Streams that revisit a state without settling into
    the cycle fall back to an exact scan over all periods.
    """
    stream = list(stream)
    first: dict[Hashable, int] = {}
    ids = np.empty(len(stream), dtype=np.int64)
    candidate = None
    for j, s in enumerate(stream):
        i = first.setdefault(s, j)
        ids[j] = i
        if candidate is None and i != j:
            candidate = (i, j - i)
    if candidate is None:
        return None
    start, period = candidate
    if not _periodic_from(ids, start, period):
        found = _scan_periodicity(ids)
        if found is None:
            return None
        start, period = found
    return LoopReport(start, period, stream[start], tuple(stream[start:start + period]))


def _scan_periodicity(ids: np.ndarray) -> tuple[int, int] | None:
    n = len(ids)
    best = None
    for p in range(1, n):
        bad = np.flatnonzero(ids[: n - p] != ids[p:])
        s = int(bad[-1]) + 1 if bad.size else 0
        if s + p < n and (best is None or s < best[0]):
            best = (s, p)
    return best


def mind_loop(tr: Trace) -> LoopReport | None:
    return detect_loop(substream(tr, "mindState"))


@dataclass(frozen=True)
class ResetEvent:
    tick: int
    loop: LoopReport
    cycles: int
    ceta: Ceta


def awareness_from_trace(tr: Trace) -> list[bool]:
    """Ticks whose mental input quotes the immediately preceding moment."""
    return [any(q.source == c.t - 1 for q in c.mental.quotes()) for c in tr.cetas]


def reset_ceta(c: Ceta) -> Ceta:
    """The objectless moment: nothing attended, no mental objects, neutral
    tone, and no Wrong View; the remaining factors are kept."""
    return replace(
        c,
        body=BodyInput(c.body.pixels, frozenset()),
        mental=MentalInput(),
        mind=MindState(FeelingTone.NEUTRAL, c.mind.factor_dict() | {"wrongView": 0.0}),
    )


def nibbana_reset(
    tr: Trace,
    loop: LoopReport,
    awareness: Sequence[bool],
    m: int = 2,
    coverage: float = 0.8,
) -> ResetEvent | None:
    """Fire once ``m`` consecutive whole cycles were each watched on at
    least ``coverage`` of their ticks; the event tick follows those cycles."""
    if m < 1:
        raise ValueError("m must be >= 1")
    stream = substream(tr, "mindState")
    n = len(stream)
    s, p = loop.start, loop.period
    if p < 1 or s < 0 or s + p >= n or stream[s] != loop.witness:
        raise LoopMismatch(f"loop (start={s}, period={p}) does not fit a trace of {n} ticks")
    if any(stream[k] != stream[k + p] for k in range(s, n - p)):
        raise LoopMismatch(f"trace is not periodic with period {p} from position {s}")
    run_len = 0
    j = 0
    while s + (j + 1) * p <= n:
        lo = s + j * p
        seen = sum(1 for k in range(lo, lo + p) if k < len(awareness) and awareness[k])
        run_len = run_len + 1 if seen >= coverage * p else 0
        if run_len == m:
            e = lo + p
            base = tr.cetas[e] if e < n else tr.cetas[-1].at(tr.cetas[-1].t + 1)
            return ResetEvent(tr.t0 + e, loop, m, reset_ceta(base))
        j += 1
    return None


def resume_after_reset(
    agent: AgentSpec,
    world: WorldSpec,
    tr: Trace,
    event: ResetEvent,
    *,
    n_steps: int | None = None,
    hooks: Sequence[Hook] = (),
) -> Trace:
    """Replace the tick of ``event`` with the reset moment and run on from it.

    By default the resumed trace keeps the original length. Agents with
    memory resume from the end-of-trace snapshot, not the store at the
    reset tick.
    """
    e = event.tick - tr.t0
    if e < len(tr):
        w_e = tr.entries[e][1]
    else:
        c_last, w_last = tr.entries[-1]
        w_e = run(agent, world, c_last, w_last, tr.seed, 1, hooks=hooks, memory=tr.memory).entries[1][1]
    remaining = (len(tr) - 1 - e) if n_steps is None else n_steps
    tail = run(
        agent, world, event.ceta, w_e, tr.seed, max(remaining, 0),
        hooks=hooks, memory=tr.memory, scenario_id=tr.scenario_id,
    )
    return Trace(
        tr.entries[:e] + tail.entries,
        t0=tr.t0, seed=tr.seed, scenario_id=tr.scenario_id, memory=tail.memory,
    )
