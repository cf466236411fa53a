import json
import subprocess
import sys

import pytest

from ganimals.cli import main

CFG = {"n_worlds": 2, "seed_set_size": 10, "resolution": 16}


@pytest.fixture()
def cfg_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(CFG))
    return str(path)


def test_simulate_writes_report(tmp_path, cfg_path):
    out = tmp_path / "report.json"
    code = main(
        ["simulate", "--config", cfg_path, "--users", "5", "--steps", "8",
         "--seed", "4", "--out", str(out)]
    )
    assert code == 0
    report = json.loads(out.read_text())
    assert report["parameters"] == {
        "n_users": 5, "n_steps": 8, "seed": 4, "preference": "mixed",
        "n_worlds": 2, "mix": [0.3, 0.3, 0.3, 0.1], "seed_set_size": 10,
        "resolution": 16,
    }


def test_simulate_byte_identical(tmp_path, cfg_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    args = ["simulate", "--config", cfg_path, "--users", "5", "--steps", "8", "--seed", "4"]
    main(args + ["--out", str(out1)])
    main(args + ["--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_simulate_stdout(capsys, cfg_path):
    main(["simulate", "--config", cfg_path, "--users", "3", "--steps", "2", "--seed", "0"])
    report = json.loads(capsys.readouterr().out)
    assert report["parameters"]["n_users"] == 3


def test_stats_fresh_simulation(capsys, cfg_path):
    code = main(
        ["stats", "--config", cfg_path, "--metric", "cute", "--predicate", "contains_dog",
         "--users", "10", "--steps", "25", "--seed", "6"]
    )
    assert code == 0
    result = json.loads(capsys.readouterr().out)
    assert result["metric"] == "cute"
    assert result["predicate"] == "contains_dog"
    assert result["n_with"] >= 2
    assert 0.0 <= result["p_value"] <= 1.0


def test_stats_unknown_predicate_exits_2(cfg_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["stats", "--config", cfg_path, "--predicate", "contains_unicorn",
              "--users", "4", "--steps", "4"])
    assert exc.value.code == 2
    assert "predicate" in capsys.readouterr().err


def test_insufficient_corpus_exits_2(cfg_path, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["stats", "--config", cfg_path, "--users", "2", "--steps", "0"])
    assert exc.value.code == 2


def test_env_override(tmp_path, cfg_path, monkeypatch, capsys):
    monkeypatch.setenv("GANIMALS_SEED_SET_SIZE", "4")
    main(["simulate", "--config", cfg_path, "--users", "2", "--steps", "0", "--seed", "1"])
    report = json.loads(capsys.readouterr().out)
    assert report["parameters"]["seed_set_size"] == 4


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ganimals.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    for command in ("serve", "simulate", "stats"):
        assert command in proc.stdout


def test_installed_script_help():
    proc = subprocess.run(["ganimals", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "simulate" in proc.stdout
