import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from cetana.cli import EXIT_MISMATCH, EXIT_OK, EXIT_RUNTIME, EXIT_SCENARIO, main, replay, run_scenario, trace_metrics
from cetana.tracefile import BASE_COLUMNS, parse_row, read_rows, read_trace, row_for

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
ANGER = SCENARIOS / "anger_bandit.scn"


def _run(path, out, **kw):
    stdout, stderr = io.StringIO(), io.StringIO()
    code = run_scenario(path, out=str(out), stdout=stdout, stderr=stderr, **kw)
    return code, stdout.getvalue(), stderr.getvalue()


def _replay(trace, scn, **kw):
    stdout = io.StringIO()
    code = replay(trace, scn, stdout=stdout, stderr=io.StringIO(), **kw)
    return code, stdout.getvalue()


@pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.scn")), ids=lambda p: p.stem)
def test_shipped_scenarios_run_and_replay(path, tmp_path):
    code, out, _ = _run(path, tmp_path, steps=60)
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["steps"] == 60
    for name in ("trace.csv", "report.json", "run.meta"):
        assert (tmp_path / name).is_file()
    header, rows = read_rows(tmp_path / "trace.csv")
    assert tuple(header[: len(BASE_COLUMNS)]) == BASE_COLUMNS
    assert len(rows) == 61
    parsed = [parse_row(r)[0] for r in rows]
    assert [c.t for c in parsed] == list(range(parsed[0].t, parsed[0].t + 61))
    assert _replay(tmp_path / "trace.csv", path)[0] == EXIT_OK
    assert _replay(tmp_path / "trace.csv", tmp_path / "effective.scn")[0] == EXIT_SCENARIO
    json.loads((tmp_path / "report.json").read_text())


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert _run(ANGER, a)[0] == EXIT_OK and _run(ANGER, b)[0] == EXIT_OK
    for name in ("trace.csv", "report.json", "run.meta"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_trace_rows_round_trip(tmp_path):
    _run(ANGER, tmp_path, steps=50)
    tr = read_trace(tmp_path / "trace.csv")
    with open(tmp_path / "trace.csv", newline="") as fh:
        raw = list(csv.reader(fh))[1:]
    assert [row_for(c, w) for c, w in tr.entries] == [r[: len(BASE_COLUMNS)] for r in raw]


def test_malformed_scenario_writes_nothing(tmp_path):
    bad = tmp_path / "bad.scn"
    bad.write_text("[scenario]\nseed = 1\nsteps = 5\n[world]\nkind = rewardBandit\nkind = grid\n")
    out = tmp_path / "out"
    code, stdout, stderr = _run(bad, out)
    assert code == EXIT_SCENARIO and stdout == ""
    assert "line 6" in stderr
    assert not out.exists()


def test_missing_scenario_file(tmp_path):
    assert _run(tmp_path / "nope.scn", tmp_path / "out")[0] == EXIT_SCENARIO


def test_strict_flag_rejects_unknown_keys(tmp_path):
    scn = tmp_path / "x.scn"
    scn.write_text(ANGER.read_text() + "colour = blue\n")
    code, _, stderr = _run(scn, tmp_path / "lenient")
    assert code == EXIT_OK and "warning" in stderr
    assert _run(scn, tmp_path / "strict", strict=True)[0] == EXIT_SCENARIO


def test_zero_steps_gives_one_row(tmp_path):
    assert _run(ANGER, tmp_path, steps=0)[0] == EXIT_OK
    assert len(read_rows(tmp_path / "trace.csv")[1]) == 1


def test_seed_override_recorded(tmp_path):
    _run(ANGER, tmp_path, seed=99)
    meta = dict(line.split(" = ") for line in (tmp_path / "run.meta").read_text().splitlines())
    assert meta["seed"] == "99" and meta["scenario"] == "anger_bandit"
    assert meta["scenario_sha256"] != meta["effective_sha256"]


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CETANA_OUT", str(tmp_path / "env"))
    assert run_scenario(ANGER, steps=5, stdout=io.StringIO(), stderr=io.StringIO()) == EXIT_OK
    assert (tmp_path / "env" / "trace.csv").is_file()


def test_default_output_dir(tmp_path, monkeypatch):
    monkeypatch.delenv("CETANA_OUT", raising=False)
    monkeypatch.chdir(tmp_path)
    assert run_scenario(ANGER, steps=5, stdout=io.StringIO(), stderr=io.StringIO()) == EXIT_OK
    assert (tmp_path / "runs" / "anger_bandit" / "trace.csv").is_file()


def test_replay_detects_edited_feeling(tmp_path):
    _run(ANGER, tmp_path, steps=40)
    path = tmp_path / "trace.csv"
    assert _replay(path, ANGER)[0] == EXIT_OK
    with open(path, newline="") as fh:
        raw = list(csv.reader(fh))
    col = raw[0].index("feeling")
    raw[21][col] = "2" if raw[21][col] != "2" else "-2"
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(raw)
    code, out = _replay(path, ANGER)
    assert code == EXIT_MISMATCH
    assert json.loads(out)["tick"] == int(raw[21][0])


def test_replay_with_other_seed_mismatches(tmp_path):
    _run(ANGER, tmp_path, steps=40)
    assert _replay(tmp_path / "trace.csv", ANGER, seed=8)[0] == EXIT_MISMATCH


def test_replay_missing_trace(tmp_path):
    assert _replay(tmp_path / "none.csv", ANGER)[0] == EXIT_RUNTIME


def test_metrics_command(tmp_path, capsys):
    _run(ANGER, tmp_path, steps=60)
    result = trace_metrics(tmp_path / "trace.csv", "10..40")
    assert result["window"] == [10, 40]
    assert result["suffering"]["pain"] >= 0
    assert main(["metrics", str(tmp_path / "trace.csv")]) == EXIT_OK
    assert "suffering" in json.loads(capsys.readouterr().out)
    assert main(["metrics", str(tmp_path / "none.csv")]) == EXIT_RUNTIME


def test_main_dispatch(tmp_path, capsys):
    out = tmp_path / "m"
    assert main(["run", str(ANGER), "--steps", "10", "--out", str(out)]) == EXIT_OK
    assert main(["replay", str(out / "trace.csv"), str(ANGER)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["status"] == "ok"


def test_module_entry_point(tmp_path):
    out = tmp_path / "p"
    proc = subprocess.run(
        [sys.executable, "-m", "cetana", "run", str(ANGER), "--steps", "5", "--out", str(out)],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0, proc.stderr
    assert (out / "run.meta").is_file()
