"""Couple two agents so each one's actions become the other's input.

Agent B is wrapped as agent A's world.  The wrapped world state holds B's
current ceta and the pixel encoding of B's selected actions, which is all A
can perceive.  B draws randomness from its own seed, keyed by tick the same
way :func:`cetana.dynamics.run` keys A's draws, so the pairing is symmetric
under swapping the roles of A and B.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

from .core import Action, Ceta, Trace, WorldState
from .dynamics import AgentSpec, WorldSpec, run, tick_source
from .errors import EncoderMismatch
from .rng import RandomnessSource


@dataclass(frozen=True)
class Encoder:
    """Maps action ids to pixel indices of a fixed-width binary vector."""

    table: Mapping[str, int]
    width: int

    @classmethod
    def for_menu(cls, table: Mapping[str, int], menu: frozenset[str], width: int | None = None) -> Encoder:
        missing = sorted(menu - set(table))
        if missing:
            raise EncoderMismatch(f"actions {missing} have no encoding")
        if width is None:
            width = max(table.values(), default=-1) + 1
        if any(not 0 <= v < width for v in table.values()):
            raise EncoderMismatch(f"encoding outside pixel width {width}")
        return cls(dict(table), width)

    def __call__(self, action: Action) -> tuple[int, ...]:
        pixels = [0] * self.width
        for a in action.selected:
            if a not in self.table:
                raise EncoderMismatch(f"action {a!r} has no encoding")
            pixels[self.table[a]] = 1
        return tuple(pixels)


def wrap_as_world(
    partner: AgentSpec, own: Encoder, partner_enc: Encoder, partner_seed: int, observer: str = "agent"
) -> WorldSpec:
    """World whose state is ``partner``'s ceta plus its encoded action.

    ``own`` encodes the observing agent's actions into the partner's pixels.
    """
    kind = f"agent:{partner.name}"

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource) -> WorldState:
        c_p = w.cells[0]
        partner.check(c_p)
        seen_by_partner = WorldState(f"agent:{observer}", (c, own(c.action)))
        c_next = partner.transition(c_p, seen_by_partner, tick_source(partner_seed, c_p.t).spawn(), None)
        if c_next.t != c_p.t + 1:
            c_next = c_next.at(c_p.t + 1)
        return WorldState(kind, (c_next, partner_enc(c_next.action)))

    def initial(rng: RandomnessSource) -> WorldState:
        raise ValueError("a wrapped agent's initial state comes from its initial ceta")

    return WorldSpec(transition, kind, initial)


@dataclass(frozen=True)
class ComposedSystem:
    a: AgentSpec
    b: AgentSpec
    encode_ab: Encoder
    encode_ba: Encoder

    def world_for_a(self, seed_b: int) -> WorldSpec:
        return wrap_as_world(self.b, self.encode_ab, self.encode_ba, seed_b, self.a.name)

    def initial_world(self, c_b0: Ceta) -> WorldState:
        return WorldState(f"agent:{self.b.name}", (c_b0, self.encode_ba(c_b0.action)))

    def run(
        self, c_a0: Ceta, c_b0: Ceta, seed_a: int, seed_b: int, n_steps: int, run_id: str = ""
    ) -> tuple[Trace, Trace]:
        """Step both agents ``n_steps`` ticks; returns (A's trace, B's trace)."""
        if c_a0.t != c_b0.t:
            raise ValueError("composed agents must start on the same tick")
        tr_a = run(
            self.a, self.world_for_a(seed_b), c_a0, self.initial_world(c_b0), seed_a, n_steps,
            scenario_id=run_id,
        )
        b_entries = []
        for c_a, w in tr_a.entries:
            c_b = w.cells[0]
            b_entries.append((c_b, WorldState(f"agent:{self.a.name}", (c_a, self.encode_ab(c_a.action)))))
        tr_b = Trace(tuple(b_entries), t0=tr_a.t0, seed=seed_b, scenario_id=run_id)
        return tr_a, tr_b


def compose_agents(
    a: AgentSpec,
    b: AgentSpec,
    encode_ab: Mapping[str, int],
    encode_ba: Mapping[str, int],
    *,
    width_ab: int | None = None,
    width_ba: int | None = None,
) -> ComposedSystem:
    """``encode_ab`` maps A's actions into B's pixel indices; ``encode_ba`` the reverse."""
    return ComposedSystem(
        a, b,
        Encoder.for_menu(encode_ab, a.menu, width_ab),
        Encoder.for_menu(encode_ba, b.menu, width_ba),
    )
