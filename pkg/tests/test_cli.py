import json

import numpy as np
import pytest

from hyperplate import cli
from hyperplate.config import DEFAULTS, build_setup, content_hash, resolve
from hyperplate.io import read_matrix_csv, read_pgm, write_field_csv, write_matrix_csv, write_pgm
from hyperplate.mesh import build_plate
from hyperplate.observation import read_sensor_csv

SMALL = {
    "mesh": {"cells": [2, 4, 4]},
    "time": {"steps": 8},
    "dictionary": {"knots_per_axis": 4},
    "landweber": {"omega": 2.5, "max_iter": 2},
}


def write_config(tmp_path, cfg, name="cfg.json"):
    cfg = json.loads(json.dumps(cfg))
    cfg.setdefault("output", {})["dir"] = str(tmp_path / "out")
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_resolve_defaults():
    cfg = resolve({})
    assert cfg == DEFAULTS
    assert resolve({"time": {"steps": 4}})["time"] == {"horizon": 4.0, "steps": 4, "theta": 0.5}
    with pytest.raises(ValueError):
        resolve({"meshes": {}})


def test_content_hash_canonical():
    assert content_hash({"a": 1, "b": 2}) == content_hash({"b": 2, "a": 1})
    assert content_hash({"a": 1}) != content_hash({"a": 2})


def test_build_setup_variants():
    s = build_setup({**SMALL, "sensors": {"layout": "R3d"}})
    assert s.sensors.count == 16 and s.problem.mesh.n_nodes == 75
    s = build_setup({**SMALL, "sensors": {"nodes": [0, 1], "component": "x1"}})
    assert list(s.sensors.components) == [0, 0]
    s = build_setup({**SMALL, "scenario": {"damages": [{"center": [3.0, -2.0], "side": 2.0}]}})
    assert s.scenario.damages[0].value == 0.5


def test_matrix_csv_roundtrip(tmp_path, rng):
    a = rng.standard_normal((3, 4))
    write_matrix_csv(tmp_path / "a.csv", a)
    assert np.array_equal(read_matrix_csv(tmp_path / "a.csv"), a)


def test_pgm_roundtrip(tmp_path):
    a = np.array([[0.5, 1.0], [1.0, 1.5]])
    write_pgm(tmp_path / "a.pgm", a)
    gray, (lo, hi) = read_pgm(tmp_path / "a.pgm")
    assert (lo, hi) == (0.5, 1.5)
    assert gray.tolist() == [[0, 128], [128, 255]]
    write_pgm(tmp_path / "c.pgm", np.ones((2, 2)))
    assert read_pgm(tmp_path / "c.pgm")[0].max() == 0


def test_field_csv(tmp_path):
    mesh = build_plate(cells=(1, 1, 1))
    write_field_csv(tmp_path / "u.csv", mesh, np.arange(mesh.n_dofs, dtype=float))
    lines = (tmp_path / "u.csv").read_text().splitlines()
    assert lines[0] == "x1,x2,x3,u1,u2,u3" and len(lines) == 9


def test_reconstruct_full_field(tmp_path):
    path = write_config(tmp_path, SMALL)
    assert cli.main(["reconstruct", str(path)]) == 0
    out = tmp_path / "out"
    alpha = read_matrix_csv(out / "alpha.csv")
    assert alpha.shape == (5, 5)
    res = json.loads((out / "residuals.json").read_text())
    assert res["iterations"] == 2 and "timings" not in res
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config"]["landweber"]["omega"] == 2.5
    assert meta["config_hash"] == content_hash(meta["config"])
    assert meta["kernel_backend"] in ("compiled", "python")
    assert not (out / "sensors.csv").exists()


def test_reconstruct_sensors(tmp_path):
    cfg = {**SMALL, "sensors": {"layout": "R3d"},
           "landweber": {"omega": 0.1, "max_iter": 1, "noise_delta": 0.05}}
    path = write_config(tmp_path, cfg)
    assert cli.main(["reconstruct", str(path)]) == 0
    out = tmp_path / "out"
    assert read_sensor_csv(out / "sensors.csv").shape == (9, 16)
    meta = json.loads((out / "meta.json").read_text())
    assert len(meta["sensors"]["node_ids"]) == 16


@pytest.mark.parametrize("cfg", [
    {"bogus": {}},
    {"scenario": {"name": "Z"}},
    {"landweber": {"tau": 1.5}},
    {"sensors": {"layout": "R99d"}},
    {"mesh": {"cells": [0, 4, 4]}},
])
def test_invalid_config_writes_nothing(tmp_path, cfg, capsys):
    path = write_config(tmp_path, cfg)
    assert cli.main(["reconstruct", str(path)]) != 0
    assert not (tmp_path / "out").exists()
    assert "error" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert cli.main(["reconstruct", str(tmp_path / "nope.json")]) != 0


def test_simulate(tmp_path):
    path = write_config(tmp_path, {**SMALL, "sensors": {"layout": "R2d"}})
    assert cli.main(["simulate", str(path)]) == 0
    out = tmp_path / "out"
    assert len(list((out / "fields").glob("u_*.csv"))) == 9
    assert read_sensor_csv(out / "sensors.csv").shape == (9, 8)


def test_scenario_command(tmp_path):
    out = tmp_path / "sc" / "a.json"
    assert cli.main(["scenario", "A", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["damaged_knots"] == [[[4, 4]]]
    assert np.array(data["alpha_true"])[4, 4] == 0.5


def test_verify_command(capsys):
    assert cli.main(["verify", "material"]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 4 and "4/4" in out


def test_bad_subcommand():
    with pytest.raises(SystemExit):
        cli.main(["frobnicate"])
