import csv
import io
import json
import subprocess
import sys
from collections import Counter

import pytest

from edrlab.cli import ConfigError, emit_plot_data, fmt, main, read_config_file, resolve_config, run_scenario
from edrlab.scenarios import SCENARIOS

EXPECTED = {
    "von-neumann-edr",
    "ozawa-violation",
    "kennard",
    "arthurs-kelly",
    "cnot-qubit",
    "theorem1-fuzz",
    "universal-edr-fuzz",
    "three-state-demo",
    "weak-method-demo",
    "ozawa-tau-sweep",
}


def read_rows(path):
    return list(csv.DictReader(io.StringIO(path.read_text())))


def test_scenario_registry():
    assert set(SCENARIOS) == EXPECTED


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    for name in EXPECTED:
        assert name in out


def test_unknown_scenario(tmp_path, capsys):
    assert main(["run", "no-such-thing", "--out", str(tmp_path)]) == 2
    assert "available" in capsys.readouterr().err


def test_unknown_setting(tmp_path, capsys):
    assert main(["run", "kennard", "--instances", "3", "--out", str(tmp_path)]) == 2
    assert "unknown setting" in capsys.readouterr().err


def test_bad_value_and_malformed_file(tmp_path, capsys):
    assert main(["run", "theorem1-fuzz", "--instances", "many", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("instances\n")
    assert main(["run", "theorem1-fuzz", "--config", str(bad), "--out", str(tmp_path)]) == 2
    assert main(["run", "theorem1-fuzz", "--config", str(tmp_path / "missing.ini"), "--out", str(tmp_path)]) == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[fuzz]\ninstances = 4\n")
    assert read_config_file(cfg) == {"instances": "4"}
    assert resolve_config("theorem1-fuzz", read_config_file(cfg), {})["instances"] == 4
    assert resolve_config("theorem1-fuzz", read_config_file(cfg), {"instances": "6"})["instances"] == 6
    assert resolve_config("theorem1-fuzz", {}, {})["instances"] == SCENARIOS["theorem1-fuzz"].defaults["instances"]
    with pytest.raises(ConfigError):
        resolve_config("theorem1-fuzz", {"colour": "red"}, {})


def test_run_writes_reports(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("instances = 5\n")
    assert main(["run", "theorem1-fuzz", "--config", str(cfg), "--seed", "7", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "theorem1-fuzz.json").read_text())
    assert report["inputs"]["instances"] == 5
    assert report["seed"] == 7
    assert report["passed"] is True and report["failures"] == []
    assert report["summary"]["all_agree_count"] == 5
    assert "theorem_tol" in report["tolerances"]
    assert len(read_rows(tmp_path / "theorem1-fuzz.csv")) == 5


def test_env_output_directory(tmp_path, monkeypatch):
    monkeypatch.setenv("EDRLAB_OUT", str(tmp_path / "env"))
    _, paths = run_scenario("kennard")
    assert paths["json"].parent == tmp_path / "env"
    assert paths["json"].exists()


def test_ozawa_violation_row(tmp_path):
    report, paths = run_scenario("ozawa-violation", {"instances": 20}, out=tmp_path)
    assert report["passed"]
    for row in read_rows(paths["csv"]):
        assert float(row["epsilon_Q"]) == 0.0
        assert float(row["product"]) == 0.0
        assert row["heisenberg_satisfied"] == "false"
        assert row["ozawa_satisfied"] == "true"


def test_von_neumann_sweep(tmp_path):
    report, paths = run_scenario("von-neumann-edr", {"instances": 20}, out=tmp_path)
    assert report["passed"]
    rows = read_rows(paths["csv"])
    assert {float(r["probe_width"]) for r in rows} >= {0.25, 0.5, 1.0, 2.0}
    for r in rows:
        assert float(r["product"]) >= 0.5 - 1e-12


def test_failures_set_exit_code(tmp_path, monkeypatch, capsys):
    import edrlab.scenarios as sc

    def broken(cfg, seed, jobs):
        res = sc.ScenarioResult("kennard", "case")
        res.check("always fails", False, 0, "forced")
        return res

    monkeypatch.setitem(SCENARIOS, "kennard", sc.Scenario("kennard", "broken", broken, {}))
    assert main(["run", "kennard", "--out", str(tmp_path)]) == 1
    report = json.loads((tmp_path / "kennard.json").read_text())
    assert report["passed"] is False
    assert report["failures"][0]["name"] == "always fails"


def test_tau_sweep_long_format(tmp_path):
    _, paths = run_scenario("ozawa-tau-sweep", out=tmp_path)
    rows = read_rows(paths["long"])
    assert list(rows[0]) == ["scenario", "parameter", "quantity", "value"]
    counts = Counter(r["quantity"] for r in rows if ":S[" in r["quantity"])
    assert len(counts) == 32
    assert set(counts.values()) == {101}


def test_empty_report_gives_header_only():
    out = emit_plot_data({"scenario": "x", "parameter": "p", "rows": []})
    assert out == "scenario,parameter,quantity,value\n"


def test_missing_report(tmp_path):
    with pytest.raises(FileNotFoundError):
        emit_plot_data(tmp_path / "nope.json")


def test_plot_data_from_written_report(tmp_path):
    _, paths = run_scenario("kennard", out=tmp_path)
    assert emit_plot_data(paths["json"]) == paths["long"].read_text()


def test_fmt():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(True) == "true"
    assert fmt(3) == "3"


@pytest.mark.parametrize("name", ["cnot-qubit", "three-state-demo"])
def test_byte_identical_reruns(tmp_path, name):
    cfg = {"three-state-demo": {"instances": 10, "seeds": 2, "n_shots": 1000}}.get(name)
    _, a = run_scenario(name, cfg, seed=3, out=tmp_path / "a")
    _, b = run_scenario(name, cfg, seed=3, out=tmp_path / "b")
    _, c = run_scenario(name, cfg, seed=3, jobs=2, out=tmp_path / "c")
    for key in ("json", "csv", "long"):
        assert a[key].read_bytes() == b[key].read_bytes() == c[key].read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "edrlab.cli", "run", "kennard", "--out", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "PASS" in proc.stderr
