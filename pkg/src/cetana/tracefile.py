"""``trace.csv``: one row per tick, lists joined with ``;``.

Columns, in order::

    t, pixels, focus, mental, feeling, factors, menu, action, world

``factors`` holds ``name:intensity`` pairs, ``mental`` the object keys
(``concept:x``, ``quote@3:factor:anger``, ...), and ``world`` the canonical
JSON of the world state.  Optional ``layer:<value>``, ``pain`` and ``lack``
columns may follow; readers ignore columns they do not know.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from collections.abc import Mapping, Sequence
from pathlib import Path

from .core import (
    Action,
    BodyInput,
    Ceta,
    FeelingTone,
    MentalInput,
    MindState,
    Trace,
    WorldState,
    canonical_json,
    parse_mental_item,
    world_from_dict,
)

BASE_COLUMNS = ("t", "pixels", "focus", "mental", "feeling", "factors", "menu", "action", "world")


def _join(items) -> str:
    return ";".join(str(x) for x in items)


def _split(text: str) -> list[str]:
    return text.split(";") if text else []


def row_for(c: Ceta, w: WorldState) -> list[str]:
    return [
        str(c.t),
        _join(c.body.pixels),
        _join(sorted(c.body.focus)),
        _join(c.mental.keys()),
        str(int(c.mind.feeling)),
        _join(f"{k}:{v!r}" for k, v in c.mind.factors),
        _join(sorted(c.action.menu)),
        _join(sorted(c.action.selected)),
        canonical_json(w),
    ]


def parse_row(row: Mapping[str, str]) -> tuple[Ceta, WorldState]:
    factors = {}
    for pair in _split(row["factors"]):
        name, _, value = pair.rpartition(":")
        factors[name] = float(value)
    c = Ceta(
        body=BodyInput(tuple(int(p) for p in _split(row["pixels"])), frozenset(int(i) for i in _split(row["focus"]))),
        mental=MentalInput(parse_mental_item(k) for k in _split(row["mental"])),
        mind=MindState(FeelingTone(int(row["feeling"])), factors),
        action=Action(frozenset(_split(row["menu"])), frozenset(_split(row["action"]))),
        t=int(row["t"]),
    )
    return c, world_from_dict(json.loads(row["world"]))


def render_trace(tr: Trace, extra: Mapping[str, Sequence[str]] | None = None) -> str:
    extra = dict(extra or {})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*BASE_COLUMNS, *extra])
    for k, (c, w) in enumerate(tr.entries):
        writer.writerow([*row_for(c, w), *(col[k] for col in extra.values())])
    return buf.getvalue()


def read_rows(path: str | Path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
        header = list(reader.fieldnames or [])
    missing = [c for c in BASE_COLUMNS if c not in header]
    if missing:
        raise ValueError(f"trace file lacks columns {missing}")
    return header, rows


def read_trace(path: str | Path, seed: int = 0, scenario_id: str = "") -> Trace:
    _, rows = read_rows(path)
    entries = tuple(parse_row(r) for r in rows)
    t0 = entries[0][0].t if entries else 0
    return Trace(entries, t0=t0, seed=seed, scenario_id=scenario_id)


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
