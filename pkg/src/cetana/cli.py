"""Command line entry point.

::

    cetana run <scenario> [--seed N] [--steps N] [--out DIR] [--strict]
    cetana replay <trace.csv> <scenario> [--seed N]
    cetana metrics <trace.csv> [--window a..b] [--self ids]

``run`` exits 0 on success, 1 on a scenario error (nothing is written) and
2 on a runtime error.  ``replay`` exits 3 when the trace diverges.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import TextIO

from . import metrics as M
from .contemplative import mind_loop
from .errors import CetanaError
from .runner import build_report, replay_verify, simulate, trace_columns
from .scenario import Scenario, ScenarioError, parse_scenario, serialize_scenario, validate
from .tracefile import atomic_write, read_trace, render_trace

EXIT_OK, EXIT_SCENARIO, EXIT_RUNTIME, EXIT_MISMATCH = 0, 1, 2, 3


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def load_scenario(
    path: str | Path,
    *,
    seed: int | None = None,
    steps: int | None = None,
    strict: bool = False,
    stderr: TextIO | None = None,
) -> tuple[Scenario, str]:
    text = Path(path).read_text(encoding="utf-8")
    warn = (lambda msg: print(f"{path}: warning: {msg}", file=stderr)) if stderr else None
    s = parse_scenario(text, strict=strict, warn=warn)
    if seed is not None:
        s = replace(s, seed=seed)
    if steps is not None:
        s = replace(s, steps=steps)
    validate(s)
    return s, text


def output_dir(s: Scenario, out: str | None) -> Path:
    if out:
        return Path(out)
    env = os.environ.get("CETANA_OUT")
    if env:
        return Path(env)
    return Path("runs") / s.id


def run_scenario(
    path: str | Path,
    *,
    seed: int | None = None,
    steps: int | None = None,
    out: str | None = None,
    strict: bool = False,
    stdout: TextIO | None = None,
    stderr: TextIO | None = None,
) -> int:
    """Run a scenario file and write ``trace.csv``, ``report.json`` and ``run.meta``."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        s, text = load_scenario(path, seed=seed, steps=steps, strict=strict, stderr=stderr)
    except (OSError, UnicodeDecodeError) as exc:
        print(f"{path}: cannot read scenario: {exc}", file=stderr)
        return EXIT_SCENARIO
    except ScenarioError as exc:
        print(f"{path}: {exc}", file=stderr)
        return EXIT_SCENARIO

    try:
        sim = simulate(s)
        report = build_report(sim)
        trace_text = render_trace(sim.trace, trace_columns(sim))
        meta = "\n".join([
            f"scenario = {s.id}",
            f"seed = {s.seed}",
            f"steps = {s.steps}",
            f"t0 = {s.t0}",
            f"scenario_sha256 = {hashlib.sha256(text.encode()).hexdigest()}",
            f"effective_sha256 = {hashlib.sha256(serialize_scenario(s).encode()).hexdigest()}",
        ]) + "\n"
        dest = output_dir(s, out)
        dest.mkdir(parents=True, exist_ok=True)
        atomic_write(dest / "trace.csv", trace_text)
        atomic_write(dest / "report.json", _dumps(report))
        atomic_write(dest / "run.meta", meta)
    except (CetanaError, OSError, ValueError) as exc:
        print(f"{path}: run failed: {exc}", file=stderr)
        return EXIT_RUNTIME

    summary = {
        "scenario": s.id,
        "seed": s.seed,
        "steps": s.steps,
        "out": str(dest),
        "pain": report["suffering"]["pain"],
        "loop": report["loop"],
        "reset": report["reset"],
    }
    print(json.dumps(summary, sort_keys=True), file=stdout)
    return EXIT_OK


def replay(trace_path: str | Path, scenario_path: str | Path, *, seed: int | None = None,
           strict: bool = False, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        s, _ = load_scenario(scenario_path, seed=seed, strict=strict, stderr=stderr)
    except (OSError, UnicodeDecodeError, ScenarioError) as exc:
        print(f"{scenario_path}: {exc}", file=stderr)
        return EXIT_SCENARIO
    try:
        with open(trace_path, newline="", encoding="utf-8") as fh:
            raw = list(csv.reader(fh))
        header, rows = raw[0], raw[1:]
        result = replay_verify(rows, header, s)
    except (OSError, IndexError, CetanaError, ValueError) as exc:
        print(f"{trace_path}: {exc}", file=stderr)
        return EXIT_RUNTIME
    if result.ok:
        print(json.dumps({"status": "ok", "ticks": len(rows)}), file=stdout)
        return EXIT_OK
    print(json.dumps({"status": "mismatch", "tick": result.tick, "reason": result.reason}), file=stdout)
    return EXIT_MISMATCH


def trace_metrics(trace_path: str | Path, window: str | None = None, self_concepts: str = "",
                  fear_level: float = 0.5) -> dict:
    tr = read_trace(trace_path)
    win = M.parse_window(window) if window else (tr.t0, tr.t0 + len(tr))
    selfs = [x.strip() for x in self_concepts.split(",") if x.strip()]
    out = {
        "window": list(win),
        "suffering": M.suffering_report(tr, win, fear_level).to_dict(),
        "selfing": M.selfing_score(tr, selfs, win),
        "threeCharacteristics": None,
        "loop": None,
    }
    if win[1] - win[0] >= 2:
        tc = M.three_characteristics(tr, win, selfs)
        out["threeCharacteristics"] = {
            "compoundness": tc.compoundness, "fluctuation": tc.fluctuation, "impersonality": tc.impersonality,
        }
    loop = mind_loop(tr)
    if loop is not None:
        out["loop"] = {"start": tr.t0 + loop.start, "period": loop.period}
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cetana", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario and write trace.csv, report.json, run.meta")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int)
    p.add_argument("--out", help="output directory (default: $CETANA_OUT or runs/<id>)")
    p.add_argument("--strict", action="store_true", help="treat unknown keys as errors")

    p = sub.add_parser("replay", help="regenerate a run and compare it with a trace file")
    p.add_argument("trace")
    p.add_argument("scenario")
    p.add_argument("--seed", type=int)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("metrics", help="suffering and exposure statistics of a trace file")
    p.add_argument("trace")
    p.add_argument("--window", help="half-open tick range a..b")
    p.add_argument("--self", dest="self_concepts", default="", help="comma separated self-tagged concept ids")
    p.add_argument("--fear-level", type=float, default=0.5)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return run_scenario(args.scenario, seed=args.seed, steps=args.steps, out=args.out, strict=args.strict)
    if args.command == "replay":
        return replay(args.trace, args.scenario, seed=args.seed, strict=args.strict)
    try:
        result = trace_metrics(args.trace, args.window, args.self_concepts, args.fear_level)
    except (OSError, CetanaError, ValueError) as exc:
        print(f"{args.trace}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(json.dumps(result, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
