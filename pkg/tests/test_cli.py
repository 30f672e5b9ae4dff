import json
import math
import os

import numpy as np
import pytest

from cavphase import cli, runio


def run(tmp_path, sub, cfg, name="cfg.json", out="out", extra=()):
    cfg_path = tmp_path / name
    cfg_path.write_text(json.dumps(cfg))
    out_dir = tmp_path / out
    code = cli.main([sub, "--config", str(cfg_path), "--out-dir", str(out_dir),
                     *extra])
    return code, out_dir


def test_psos_roundtrip(tmp_path):
    cfg = {"shape": "quadrupole(0.05)", "n_bounces": 50, "seed": 3,
           "launches": [{"s_norm": 0.1, "p": 0.4}, {"phi": 1.0, "sin_chi": -0.3}]}
    code, out = run(tmp_path, "psos", cfg)
    assert code == 0
    schema, cols, rows = runio.read_csv(out / "psos.csv", "psos")
    assert cols == ["traj_id", "bounce", "s_norm", "p", "weight"]
    assert len(rows) == 100
    arr = np.asarray(rows)
    assert np.all(arr[:, 2] >= 0) and np.all(arr[:, 2] < 1)
    assert np.all(np.abs(arr[:, 3]) <= 1)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["schema"] == "cavphase.summary.v1"
    assert summary["resolved"]["shape"]["harmonics"] == [[2, 0.05]]


def test_psos_deterministic_rerun(tmp_path):
    cfg = {"shape": "limacon(0.43)", "n_bounces": 40, "seed": 9,
           "launches": {"random": {"count": 5, "band": [0.1, 0.9]}}}
    _, out1 = run(tmp_path, "psos", cfg, out="a")
    _, out2 = run(tmp_path, "psos", cfg, out="b")
    assert (out1 / "psos.csv").read_bytes() == (out2 / "psos.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_seed_flag_overrides(tmp_path):
    cfg = {"shape": "limacon(0.43)", "n_bounces": 30, "seed": 9,
           "launches": {"random": {"count": 4, "band": [0.1, 0.9]}}}
    _, out1 = run(tmp_path, "psos", cfg, out="a")
    _, out2 = run(tmp_path, "psos", cfg, out="b", extra=("--seed", "10"))
    assert (out1 / "psos.csv").read_bytes() != (out2 / "psos.csv").read_bytes()


def test_unknown_key_is_config_error(tmp_path):
    cfg = {"shape": "circle", "n_bounces": 10, "bogus": 1,
           "launches": [{"s_norm": 0.0, "p": 0.5}]}
    code, out = run(tmp_path, "psos", cfg)
    assert code == cli.EXIT_CONFIG


def test_invalid_shape_names_key_path(tmp_path, capsys):
    cfg = {"shape": {"R0": 1.0, "harmonics": [[2, 2.0]]}, "n_bounces": 10,
           "launches": [{"s_norm": 0.0, "p": 0.5}]}
    code, out = run(tmp_path, "psos", cfg)
    assert code == cli.EXIT_CONFIG
    assert "harmonics" in capsys.readouterr().err


def test_numerical_failure_cleans_outputs(tmp_path):
    # all intensity escapes long before the recording window: exit 3, no files
    cfg = {"shape": "circle", "medium": {"n": 1.5, "polarization": "TE"},
           "ensemble": 20, "transient": 400, "record": 10,
           "launch_band": [0.05, 0.3], "seed": 1}
    code, out = run(tmp_path, "steady", cfg)
    assert code == cli.EXIT_NUMERICAL
    assert not list(out.glob("*.csv")) and not list(out.glob("*.json"))


def test_farfield_summary_metrics(tmp_path):
    cfg = {"shape": "limacon(0.43)", "medium": {"n": 3.3, "polarization": "TE"},
           "ensemble": 300, "transient": 10, "record": 40, "bins": 36, "seed": 5}
    code, out = run(tmp_path, "farfield", cfg)
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    res = summary["resolved"]
    assert 0.25 <= res["directionality_U"] <= 1.0
    assert res["audit"]["relative_error"] < 1e-6
    assert res["critical_sin_chi"] == pytest.approx(1 / 3.3)
    schema, cols, rows = runio.read_csv(out / "farfield.csv", "farfield")
    assert len(rows) == 36


def test_disk_modes_and_husimi_pipeline(tmp_path):
    cfg = {"n": 3.3, "polarization": "TM", "m_range": [8, 9],
           "boundary_wave": {"m": 8, "radial_order": 1, "samples": 512}}
    code, out = run(tmp_path, "disk-modes", cfg)
    assert code == 0
    doc = json.loads((out / "disk_modes.json").read_text())
    assert doc["schema"] == "cavphase.disk_modes.v1"
    assert len(doc["modes"]) == 2
    for mode in doc["modes"]:
        assert mode["im_kR0"] < 0
        assert mode["residual"] < 1e-10
        assert 0 < mode["R_generalized"] < 1
    hdr = json.loads((out / "boundary_wave.json").read_text())
    assert hdr["schema"] == "cavphase.husimi_header.v1"

    hu_cfg = {"input_csv": str(out / "boundary_wave.csv"),
              "input_header": str(out / "boundary_wave.json"),
              "side": "inside", "s_cells": 32, "sinchi_cells": 32}
    code2, out2 = run(tmp_path, "husimi", hu_cfg, name="hu.json", out="hu")
    assert code2 == 0
    dia = json.loads((out2 / "husimi_diagnostics.json").read_text())
    assert dia["diagnostics"]["inside"]["chirality_ratio"] > 10
    schema, cols, rows = runio.read_csv(out2 / "husimi_incident-inside.csv",
                                        "husimi_grid")
    vals = np.asarray(rows)[:, 2]
    assert np.all(np.isnan(vals) | (vals >= 0))


def test_beam_shifts_csv(tmp_path):
    chic = math.asin(1 / 1.54)
    cfg = {"n": 1.54, "polarization": "TM", "waist_lambda": 5,
           "chi0_range": [chic - 0.1, chic + 0.1, 5]}
    code, out = run(tmp_path, "beam-shifts", cfg)
    assert code == 0
    schema, cols, rows = runio.read_csv(out / "beam_shifts.csv", "beam_shifts")
    assert cols == ["chi0", "zGH_over_lambda", "delta_chi"]
    assert len(rows) == 5


def test_lyapunov_csv(tmp_path):
    cfg = {"shape": "circle", "n_bounces": 500, "seed": 2,
           "launches": [{"s_norm": 0.2, "p": 0.6}]}
    code, out = run(tmp_path, "lyapunov", cfg)
    assert code == 0
    schema, cols, rows = runio.read_csv(out / "lyapunov.csv", "lyapunov")
    assert rows[0][1] < 0.05     # integrable: near-zero exponent


def test_psos_aniso_subcommand(tmp_path):
    cfg = {"shape": "circle",
           "contour": {"k0": 1.0, "harmonics": [[3, 0.2, math.pi / 2]]},
           "launches": {"random": {"count": 4}}, "n_bounces": 100, "seed": 3}
    code, out = run(tmp_path, "psos-aniso", cfg)
    assert code == 0
    schema, cols, rows = runio.read_csv(out / "psos.csv", "psos")
    arr = np.asarray(rows)
    assert np.all(np.abs(arr[:, 3]) <= 1.0)
    summary = json.loads((out / "summary.json").read_text())
    assert summary["resolved"]["p_normalization"] == pytest.approx(1.2)


def test_missing_config_file(tmp_path):
    code = cli.main(["psos", "--config", str(tmp_path / "nope.json"),
                     "--out-dir", str(tmp_path)])
    assert code == cli.EXIT_CONFIG


def test_emit_xy_trajectory_file(tmp_path):
    cfg = {"shape": "quadrupole(0.05)", "n_bounces": 20, "seed": 3,
           "emit_xy": True, "launches": [{"s_norm": 0.0, "p": 0.4}]}
    code, out = run(tmp_path, "psos", cfg)
    assert code == 0
    schema, cols, rows = runio.read_csv(out / "trajectory_xy.csv", "xy")
    arr = np.asarray(rows)
    # bounce points lie on the boundary
    r = np.hypot(arr[:, 2], arr[:, 3])
    assert np.all(r > 0.9) and np.all(r < 1.1)
