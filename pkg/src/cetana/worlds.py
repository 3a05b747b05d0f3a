"""Built-in toy worlds.

``grid``
    Conway's Life on a ``width x height`` torus.  Cells are 0/1 in row-major
    order.  An agent action ``poke.<k>`` sets cell ``k`` alive after the Life
    update; with no such actions the grid evolves by the Life rule alone.

``rewardBandit``
    A static table of arms, each with a distribution over feeling tones.
    The tone for the arm selected at tick ``t`` is felt at ``t + 1``; the
    agent samples it from its own stream through :func:`bandit_consequence`.
    The world records which arms were last pulled, so its pixels show the
    agent's last move.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

from .core import Ceta, FeelingTone, WorldState
from .dynamics import WorldSpec
from .errors import UnknownWorldKind
from .rng import RandomnessSource

WORLD_KINDS = ("grid", "rewardBandit")

ArmTable = tuple[tuple[str, tuple[tuple[int, float], ...]], ...]

DEFAULT_ARMS: dict[str, tuple[tuple[int, float], ...]] = {
    "a1": ((1, 1.0),),
    "a2": ((-1, 1.0),),
}


def life_step(cells: Sequence[int], width: int, height: int) -> tuple[int, ...]:
    out = []
    for r in range(height):
        for col in range(width):
            n = 0
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    if dr or dc:
                        n += cells[((r + dr) % height) * width + (col + dc) % width]
            alive = cells[r * width + col]
            out.append(1 if n == 3 or (alive and n == 2) else 0)
    return tuple(out)


def grid_world(width: int = 8, height: int = 8, density: float = 0.3) -> WorldSpec:
    if width < 1 or height < 1:
        raise ValueError("grid dimensions must be positive")

    def initial(rng: RandomnessSource) -> WorldState:
        cells = tuple(1 if rng.bernoulli(density) else 0 for _ in range(width * height))
        return WorldState("grid", (width, height, cells))

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource) -> WorldState:
        wd, ht, cells = w.cells
        nxt = list(life_step(cells, wd, ht))
        for a in c.action.selected:
            if a.startswith("poke."):
                k = int(a[5:])
                if 0 <= k < len(nxt):
                    nxt[k] = 1
        return WorldState("grid", (wd, ht, tuple(nxt)))

    return WorldSpec(transition, "grid", initial)


def normalize_arms(arms: Mapping[str, Sequence[tuple[int, float]]]) -> ArmTable:
    table = []
    for arm in sorted(arms):
        dist = tuple((int(FeelingTone(f)), float(p)) for f, p in arms[arm])
        total = sum(p for _, p in dist)
        if not dist or abs(total - 1.0) > 1e-9 or any(p < 0 for _, p in dist):
            raise ValueError(f"arm {arm!r} probabilities must be non-negative and sum to 1")
        table.append((arm, dist))
    return tuple(table)


def reward_bandit(arms: Mapping[str, Sequence[tuple[int, float]]] | None = None) -> WorldSpec:
    table = normalize_arms(arms if arms is not None else DEFAULT_ARMS)

    def initial(rng: RandomnessSource) -> WorldState:
        return WorldState("rewardBandit", (table, ()))

    def transition(c: Ceta, w: WorldState, rng: RandomnessSource) -> WorldState:
        return WorldState("rewardBandit", (w.cells[0], tuple(sorted(c.action.selected))))

    return WorldSpec(transition, "rewardBandit", initial)


def bandit_consequence(w: WorldState, selected: frozenset[str], rng: RandomnessSource) -> FeelingTone:
    """Feeling tone delivered for pulling ``selected`` in bandit state ``w``.

    Each pulled arm draws once, in sorted order; tones add and clip to the
    five-level scale. Unknown arms and an empty selection feel neutral.
    """
    table = dict(w.cells[0])
    total = 0
    for arm in sorted(selected):
        dist = table.get(arm)
        if dist is None:
            continue
        tones = [f for f, _ in dist]
        total += rng.weighted(tones, [p for _, p in dist])
    return FeelingTone(max(-2, min(2, total)))


def expected_feeling(arms: Mapping[str, Sequence[tuple[int, float]]], arm: str) -> float:
    return sum(f * p for f, p in arms[arm])


def sense(w: WorldState) -> tuple[int, ...]:
    """Pixel vector an agent perceives from world state ``w``."""
    if w.kind == "grid":
        return tuple(w.cells[2])
    if w.kind == "rewardBandit":
        table, last = w.cells
        return tuple(1 if arm in last else 0 for arm, _ in table)
    if w.kind.startswith("agent:"):
        # a partner agent wrapped as a world: cells = (partner ceta, encoded action)
        return tuple(w.cells[1])
    return ()


def builtin_world(kind: str, **params) -> WorldSpec:
    if kind == "grid":
        return grid_world(**params)
    if kind == "rewardBandit":
        return reward_bandit(params.get("arms"))
    raise UnknownWorldKind(f"unknown world kind {kind!r}; expected one of {WORLD_KINDS}")
