import json

import pytest

from app.main import EXIT_ABORTED, EXIT_CONFIG, EXIT_INCOMPLETE, EXIT_OK, main
from tests.conftest import DEFAULT_CONFIG


def _write_config(tmp_path, **updates):
    data = json.loads(DEFAULT_CONFIG.read_text(encoding="utf-8"))
    data.update(updates)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return path


def test_validate_default(capsys):
    assert main(["validate", "--config", str(DEFAULT_CONFIG)]) == EXIT_OK
    assert "ok (4 waypoints, seed 7)" in capsys.readouterr().out


def test_validate_bad_config(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"vehicle": {}}', encoding="utf-8")
    assert main(["validate", "--config", str(path)]) == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert main(["validate", "--config", str(tmp_path / "absent.json")]) == EXIT_CONFIG


def test_short_run_writes_outputs_and_archives(tmp_path, capsys):
    config = _write_config(tmp_path, max_sim_time=1.0)
    out = tmp_path / "out"
    db = f"sqlite+aiosqlite:///{tmp_path / 'db' / 'runs.db'}"

    code = main(["run", "--config", str(config), "--seed", "3", "--out", str(out), "--db", db])
    assert code == EXIT_INCOMPLETE
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["completed"] is False
    assert (out / "run_seed3.csv").exists()
    assert json.loads((out / "metrics_seed3.json").read_text(encoding="utf-8")) == metrics

    assert main(["history", "--db", db]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    summary = json.loads(lines[0])
    assert summary["seed"] == 3
    assert summary["completed"] is False

    assert main(["history", "--db", db, "--completed"]) == EXIT_OK
    assert capsys.readouterr().out == ""


def test_json_log_format(tmp_path, capsys):
    config = _write_config(tmp_path, max_sim_time=0.5)
    out = tmp_path / "out"
    main(["run", "--config", str(config), "--out", str(out), "--format", "json"])
    capsys.readouterr()
    payload = json.loads((out / "run_seed7.json").read_text(encoding="utf-8"))
    assert payload["Ts"] == 0.1
    assert len(payload["rows"]) == 5


def test_negative_seed(tmp_path):
    config = _write_config(tmp_path, max_sim_time=0.5)
    assert main(["run", "--config", str(config), "--seed", "-4"]) == EXIT_CONFIG


def test_aborted_run(tmp_path):
    config = _write_config(tmp_path, guidance={"waypoints": [{"x": 10.0, "y": 30.0, "z": -30.0}]})
    assert main(["run", "--config", str(config)]) == EXIT_ABORTED


def test_sweep_writes_table(tmp_path, capsys):
    config = _write_config(tmp_path, max_sim_time=0.5)
    out = tmp_path / "out"
    assert main(["sweep", "--config", str(config), "--d-bar", "0,0.5", "--out", str(out)]) == EXIT_INCOMPLETE
    assert "mean_surge" in capsys.readouterr().out
    lines = (out / "sweep_d_bar.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "d_bar,mean_surge,max_cross_track_rms,completed"
    assert len(lines) == 3


def test_sweep_rejects_unordered_values(tmp_path):
    config = _write_config(tmp_path, max_sim_time=0.5)
    assert main(["sweep", "--config", str(config), "--rho-c", "0.5,0.375"]) == EXIT_CONFIG


def test_sweep_needs_a_parameter(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--config", str(DEFAULT_CONFIG)])


def test_parallel_sweep_with_aborting_runs(tmp_path):
    config = _write_config(tmp_path, guidance={"waypoints": [{"x": 10.0, "y": 30.0, "z": -30.0}]})
    assert main(["sweep", "--config", str(config), "--rho-c", "0.375,0.5", "--workers", "2"]) == EXIT_ABORTED
