import json
import shutil
from pathlib import Path

import pytest

from oracles import WORKED_OUT
from stratex.cli import main

DATA = Path(__file__).resolve().parents[1] / "data" / "worked_example"


def test_extract_json(capsys):
    assert main(["extract", "--env", "pacman", "--spec", "kill a ghost", "--samples", "20", "--seed", "7"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["samples"] == 20 and doc["seed"] == 7
    assert ["collect power-up", "kill a ghost"] in doc["strategies"]
    assert set(doc["timings_ms"]) == {"collect", "normalize", "likelihood", "cluster", "extract"}


def test_extract_text_and_saved_trajectories(tmp_path, capsys):
    rc = main(["extract", "--env", "pacman", "--spec", "kill a ghost", "--samples", "5", "--format", "text",
               "--save-trajectories", str(tmp_path / "t"), "--out", str(tmp_path / "r.json")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "l(kill a ghost) = 1.00" in out
    assert len(list((tmp_path / "t").glob("pos_*.traj"))) == 5
    assert json.loads((tmp_path / "r.json").read_text())["samples"] == 5
    # saved trajectories replay
    assert main(["replay", str(tmp_path / "t" / "pos_000.traj")]) == 0
    frames = capsys.readouterr().out
    assert frames.startswith("t=0\n") and "kill a ghost" in frames and "recorded" not in frames


def test_discover(capsys):
    assert main(["discover", "--env", "pacman", "--samples", "20"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("r_avg = ") and "kill a ghost" in out


def test_experiment_from_config(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"env": "pacman", "specs": ["kill a ghost"], "runs": 2, "sample_sizes": [10]}))
    assert main(["experiment", "--config", str(cfg), "--out", str(tmp_path / "res")]) == 0
    assert (tmp_path / "res" / "report.json").exists()
    assert (tmp_path / "res" / "headline.csv").exists()
    assert "{collect power-up, kill a ghost}" in capsys.readouterr().out


def test_matrix_worked_example(capsys):
    assert main(["matrix", str(DATA / "A.traj"), str(DATA / "B.traj")]) == 0
    out = capsys.readouterr().out
    assert out.strip().splitlines()[-1] == "{" + ", ".join(WORKED_OUT) + "}"


def test_matrix_likelihood_weight(tmp_path, capsys):
    lk = tmp_path / "l.json"
    lk.write_text(json.dumps({"move": 0, "collect dot": 0.1, "collect power-up": 0.8, "kill a ghost": 1}))
    assert main(["matrix", str(DATA / "A.traj"), str(DATA / "B.traj"), "--weight", "likelihood",
                 "--likelihoods", str(lk)]) == 0
    last = capsys.readouterr().out.strip().splitlines()[-1]
    assert last.index("collect power-up") < last.index("kill a ghost")


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--env", "tetris", "--spec", "x"])
    assert exc.value.code != 0
    with pytest.raises(SystemExit) as exc:
        main(["extract", "--bogus"])
    assert exc.value.code != 0
    assert main(["extract", "--env", "pacman", "--spec", "eat cherry"]) == 2
    assert "unknown event" in capsys.readouterr().err


def test_replay_without_actions_fails(tmp_path):
    shutil.copy(DATA / "A.traj", tmp_path / "A.traj")
    with pytest.raises(SystemExit):
        main(["replay", str(tmp_path / "A.traj"), "--env", "pacman"])
