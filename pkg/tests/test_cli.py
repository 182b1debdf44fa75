import json
import os

import pytest

from riemopt.cli import main


FLAG_CONFIG = {
    "problem": "flag_quadratic",
    "n": 12,
    "d_hat": [2, 2, 1],
    "seed": 3,
    "solver_config": {"max_outer_iterations": 80},
}


def _write_config(tmp_path, config, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def test_run_converged_exit_zero(tmp_path, capsys):
    cfg = _write_config(tmp_path, FLAG_CONFIG)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "run.json").exists() and (out / "run.csv").exists()
    log = json.loads((out / "run.json").read_text())
    assert log["converged"] is True
    assert "converged" in capsys.readouterr().out


def test_run_iteration_cap_exit_two(tmp_path):
    config = dict(FLAG_CONFIG)
    config["solver_config"] = {
        "max_outer_iterations": 2,
        "gradient_norm_tolerance": 1e-14,
    }
    cfg = _write_config(tmp_path, config)
    assert main(["run", "--config", cfg, "--out", str(tmp_path / "out")]) == 2


def test_run_malformed_config_exit_one_no_partial_files(tmp_path, capsys):
    config = dict(FLAG_CONFIG, typo_key=1)
    cfg = _write_config(tmp_path, config)
    out = tmp_path / "out"
    assert main(["run", "--config", cfg, "--out", str(out)]) == 1
    assert not out.exists()
    assert "error" in capsys.readouterr().err

    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad), "--out", str(out)]) == 1
    assert not out.exists()


def test_run_seed_override_changes_output(tmp_path):
    cfg = _write_config(tmp_path, FLAG_CONFIG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", cfg, "--out", str(out1), "--seed", "7"]) == 0
    assert main(["run", "--config", cfg, "--out", str(out2), "--seed", "8"]) == 0
    log1 = json.loads((out1 / "run.json").read_text())
    log2 = json.loads((out2 / "run.json").read_text())
    assert log1["spec"]["seed"] == 7 and log2["spec"]["seed"] == 8
    assert log1["final_cost"] != log2["final_cost"]


def test_run_validate_flag(tmp_path, capsys):
    cfg = _write_config(tmp_path, FLAG_CONFIG)
    assert main(["run", "--config", cfg, "--validate"]) == 0
    out = capsys.readouterr().out
    assert "gradient_fd" in out and "pass" in out


def test_validate_subcommand(tmp_path):
    cfg = _write_config(
        tmp_path,
        {"problem": "weighted_pca_psd", "n": 12, "p": 3, "beta": 0.5, "seed": 1},
    )
    assert main(["validate", "--config", cfg]) == 0


def test_sweep_subcommand(tmp_path, capsys):
    config = dict(FLAG_CONFIG)
    config["sweep"] = {"param": "alpha1", "values": [0.5, 1.0]}
    cfg = _write_config(tmp_path, config)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "sweep_summary.csv").exists()
    names = os.listdir(out)
    assert sum(n.endswith(".json") for n in names) == 2


def test_check_subcommand(capsys):
    assert main(["check", "--manifold", "sphere", "--trials", "10", "--seed", "0"]) == 0
    out = capsys.readouterr().out
    assert "projection" in out and "pass" in out


def test_list_problems(capsys):
    assert main(["list-problems"]) == 0
    out = capsys.readouterr().out
    for kind in ("rayleigh_stiefel", "flag_quadratic", "weighted_pca_psd", "spd_logdet"):
        assert kind in out
