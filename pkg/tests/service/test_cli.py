import json

import pytest

from neuroedge.cli import EXIT_DIVERGED, EXIT_INVALID, EXIT_OK, main

from tests.conftest import SHORT_WORKBENCH


def _config(tmp_path, data) -> str:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(data))
    return str(path)


def test_run_writes_telemetry(tmp_path, capsys):
    out = tmp_path / "out"

    code = main(["run", "--config", _config(tmp_path, SHORT_WORKBENCH), "--seed", "3", "--out", str(out)])

    assert code == EXIT_OK
    for name in ("run.csv", "spikes.csv", "weights.csv", "summary.json"):
        assert (out / name).exists()
    printed = json.loads(capsys.readouterr().out)
    assert printed["seed"] == 3
    assert printed["steps"] == 20


def test_run_over_tcp(tmp_path):
    code = main([
        "run", "--config", _config(tmp_path, SHORT_WORKBENCH),
        "--out", str(tmp_path / "out"), "--link", "tcp://127.0.0.1:0",
    ])
    assert code == EXIT_OK


def test_sweep_writes_csv(tmp_path):
    out = tmp_path / "sweep"

    code = main(["sweep", "--config", _config(tmp_path, SHORT_WORKBENCH), "--n", "5,15", "--seeds", "2", "--out", str(out)])

    assert code == EXIT_OK
    assert len((out / "sweep.csv").read_text().splitlines()) == 5


@pytest.mark.parametrize("data", [
    {**SHORT_WORKBENCH, "dt": 0},
    {**SHORT_WORKBENCH, "scenario": "lorenz"},
    {**SHORT_WORKBENCH, "link": "udp://127.0.0.1:9"},
])
def test_invalid_config_exit_code(tmp_path, data):
    assert main(["run", "--config", _config(tmp_path, data), "--out", str(tmp_path / "out")]) == EXIT_INVALID


def test_malformed_json_exit_code(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"scenario": ')
    assert main(["run", "--config", str(path)]) == EXIT_INVALID


def test_missing_config_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == EXIT_INVALID


def test_bad_neuron_counts(tmp_path):
    assert main(["sweep", "--config", _config(tmp_path, SHORT_WORKBENCH), "--n", "5,x", "--out", str(tmp_path)]) == EXIT_INVALID


def test_collision_exit_code(tmp_path):
    data = {
        "scenario": "rendezvous_static_obstacle",
        "horizon": 1.0,
        "obstacles": [{"center0": [70.0, 30.0, -5.0], "radius": 2.0}],
    }
    assert main(["run", "--config", _config(tmp_path, data), "--out", str(tmp_path / "out")]) == EXIT_DIVERGED


def test_command_is_required():
    with pytest.raises(SystemExit):
        main([])
