import csv
import json
import subprocess
import sys

import pytest
import yaml

from lockdownsim.cli import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, main

OUTPUT_FILES = ("summary.json", "quintiles.csv", "tracts.csv", "recovery_curve.csv",
                "households.csv", "population.csv", "run_meta.json")


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.yaml"
    path.write_text(yaml.safe_dump({
        "population": {"synthesize": {"households": 120, "seed": 2}},
        "scenario": {"case": "C", "crisis_duration": 3},
        "sweep": [2, 3],
        "seed": 2,
    }))
    return path


def _run(cfg, out, *extra):
    return main(["run", "--config", str(cfg), "--out", str(out), *extra])


def test_run_is_reproducible_across_worker_counts(small_config, tmp_path):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert _run(small_config, a) == EXIT_OK
    assert _run(small_config, b) == EXIT_OK
    assert _run(small_config, c, "--workers", "4") == EXIT_OK
    for name in OUTPUT_FILES:
        assert (a / name).read_bytes() == (b / name).read_bytes() == (c / name).read_bytes(), name
    summary = json.loads((a / "summary.json").read_text())
    assert summary["case"] == "C"
    assert summary["config"]["seed"] == 2


def test_flags_override_file(small_config, tmp_path):
    out = tmp_path / "o"
    assert _run(small_config, out, "--case", "b", "--tc", "6", "--seed", "9") == EXIT_OK
    s = json.loads((out / "summary.json").read_text())
    assert (s["case"], s["crisis_months"], s["config"]["seed"]) == ("B", 6.0, 9)


def test_config_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("scenario: {case: Q}\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path / "x")]) == EXIT_CONFIG
    assert "case" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "nope.yaml")]) == EXIT_CONFIG
    assert main(["run", "--tc", "-1"]) == EXIT_CONFIG
    assert main(["frobnicate"]) == EXIT_CONFIG
    assert main(["--version"]) == EXIT_OK


def test_compare(small_config, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    _run(small_config, a, "--case", "A")
    _run(small_config, b, "--case", "C")
    capsys.readouterr()
    assert main(["compare", str(a), str(b), "--out", str(tmp_path / "cmp.csv")]) == EXIT_OK
    table = capsys.readouterr().out
    assert "A Tc=3" in table and "C@40% Tc=3" in table
    rows = list(csv.reader((tmp_path / "cmp.csv").open()))
    header, body = rows[0], {r[0]: r for r in rows[1:]}
    assert header[-1].startswith("delta")
    sa = json.loads((a / "summary.json").read_text())
    sc = json.loads((b / "summary.json").read_text())
    row = next(r for name, r in body.items() if "poverty" in name and "end" in name)
    assert float(row[3]) == pytest.approx(sc["poverty"]["end_of_crisis_rate"]
                                          - sa["poverty"]["end_of_crisis_rate"], abs=1e-12)


def test_compare_refuses_different_populations(small_config, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    other = tmp_path / "other.yaml"
    other.write_text(yaml.safe_dump({"population": {"synthesize": {"households": 80, "seed": 3}}}))
    _run(small_config, a)
    _run(other, b)
    assert main(["compare", str(a), str(b)]) == EXIT_RUNTIME
    assert "hash" in capsys.readouterr().err
    assert main(["compare", str(a), str(tmp_path / "missing")]) == EXIT_RUNTIME


def test_sweep_writes_subruns(small_config, tmp_path):
    out = tmp_path / "sw"
    assert main(["sweep", "--config", str(small_config), "--out", str(out)]) == EXIT_OK
    assert (out / "tc_2" / "summary.json").exists() and (out / "tc_3" / "summary.json").exists()
    rows = list(csv.DictReader((out / "sweep.csv").open()))
    assert [r["label"] for r in rows] == ["tc_2", "tc_3"]
    exc = tmp_path / "ex"
    assert main(["sweep", "--config", str(small_config), "--out", str(exc), "--over",
                 "exclusion"]) == EXIT_OK
    rates = [json.loads((exc / k / "summary.json").read_text())["exclusion_rate"]
             for k in ("worst", "median", "best")]
    assert rates == [0.55, 0.40, 0.10]


def test_synth_and_calibrate(small_config, tmp_path, capsys):
    pop = tmp_path / "pop.csv"
    assert main(["synth", "--config", str(small_config), "--out", str(pop), "--households", "30"]) == EXIT_OK
    with pop.open() as fh:
        assert len({r["household_id"] for r in csv.DictReader(fh)}) == 30
    tracts = tmp_path / "tracts.csv"
    assert main(["synth", "--config", str(small_config), "--out", str(tracts), "--tracts"]) == EXIT_OK
    assert tracts.read_text().startswith("tract_id")
    capsys.readouterr()
    assert main(["calibrate", "--config", str(small_config)]) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert 0 < report["b"] < 2 and 0 <= report["r2"] <= 1

    filecfg = tmp_path / "file.yaml"
    filecfg.write_text(yaml.safe_dump({"population": {"file": "pop.csv"}}))
    assert main(["synth", "--config", str(filecfg)]) == EXIT_CONFIG
    out = tmp_path / "fromfile"
    assert main(["run", "--config", str(filecfg), "--out", str(out)]) == EXIT_OK
    assert json.loads((out / "summary.json").read_text())["population_sha256"]


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "lockdownsim.cli", "--help"], capture_output=True,
                         text=True)
    assert res.returncode == 0 and "sweep" in res.stdout
