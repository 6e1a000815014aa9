import json
from pathlib import Path

import numpy as np
import pytest

from scully_lamb.cli import ConfigError, SCENARIOS, load_config, main


def write(tmp_path, name, text):
    f = tmp_path / name
    f.write_text(text)
    return f


def read_csv(path):
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


def test_load_config_basic(tmp_path):
    cfg = write(tmp_path, "a.cfg", "B = 0.1\nA_grid = 0.9, 1.1\nN_list = 5\n# comment\n")
    conf = load_config(cfg, "steady-sweep")
    assert conf["A_grid"] == [0.9, 1.1]
    assert conf["N_list"] == [5.0]
    assert conf["gamma"] == 1.0


def test_load_config_rejects_unknown_key(tmp_path):
    cfg = write(tmp_path, "a.cfg", "B = 0.1\nA_grid = 1.0\nbogus = 3\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_config(cfg, "steady-sweep")


def test_load_config_reports_line_numbers(tmp_path):
    cfg = write(tmp_path, "a.cfg", "B = 0.1\nA_grid = oops\n")
    with pytest.raises(ConfigError, match="a.cfg:2"):
        load_config(cfg, "steady-sweep")


def test_load_config_missing_required(tmp_path):
    cfg = write(tmp_path, "a.cfg", "A_grid = 1.0\n")
    with pytest.raises(ConfigError, match="missing required key 'B'"):
        load_config(cfg, "steady-sweep")


def test_load_config_scenario_mismatch(tmp_path):
    cfg = write(tmp_path, "a.cfg", "scenario = hysteresis\nB = 0.1\nA_grid = 1.0\n")
    with pytest.raises(ConfigError, match="hysteresis"):
        load_config(cfg, "steady-sweep")


def test_empty_grid_rejected_before_any_output(tmp_path):
    cfg = write(tmp_path, "a.cfg", "B = 0.1\nA_grid =\n")
    out = tmp_path / "out"
    rc = main(["steady-sweep", "--config", str(cfg), "--output-dir", str(out)])
    assert rc == 2
    assert not out.exists()


def test_oracle_check_scenario(tmp_path):
    cfg = write(tmp_path, "o.cfg", "A = 1.25\nB = 0.001\nomega = 1.0\nn_max = 6\n")
    out = tmp_path / "out"
    rc = main(["oracle-check", "--config", str(cfg), "--output-dir", str(out)])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["max_eigenvalue_deviation"] < 1e-8
    header, rows = read_csv(out / "oracle_check.csv")
    assert header == ["re_full", "im_full", "re_sector", "im_sector", "abs_diff"]
    assert len(rows) == 49


def test_steady_sweep_outputs_and_determinism(tmp_path):
    cfg = write(
        tmp_path, "s.cfg",
        "B = 0.1\nA_grid = 0.8, 1.2\nN_list = 5, 10\neta_list = 0.0, 0.2\n",
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["steady-sweep", "--config", str(cfg), "--output-dir", str(out1)]) == 0
    assert main(["steady-sweep", "--config", str(cfg), "--output-dir", str(out2), "--threads", "2"]) == 0
    body1 = (out1 / "steady.csv").read_bytes()
    body2 = (out2 / "steady.csv").read_bytes()
    assert body1 == body2  # byte-identical rerun, threads included
    header, rows = read_csv(out1 / "steady.csv")
    assert header == ["A_over_gamma", "N", "eta", "n_mean", "n_mean_over_N", "g2", "fano"]
    assert len(rows) == 2 * 2 * 2
    # eta must not move the populations
    by_eta = {}
    for r in rows:
        by_eta.setdefault((r[0], r[1]), []).append(r[3])
    for pair in by_eta.values():
        assert pair[0] == pair[1]


def test_spectrum_sweep_csv_schema(tmp_path):
    cfg = write(
        tmp_path, "sp.cfg",
        "B = 0.1\nA_grid = 0.9, 1.1\nN_list = 5\nsectors = 0, 1\nlevels = 2\nomega = 1.0\n",
    )
    out = tmp_path / "out"
    assert main(["spectrum-sweep", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "spectrum.csv")
    assert header == ["N", "A_over_gamma", "k", "j", "re_lambda", "im_lambda", "spurious"]
    assert len(rows) == 2 * 2 * 2
    for r in rows:
        assert float(r[4]) <= 1e-10


def test_spectrum_sweep_block_dump(tmp_path):
    cfg = write(
        tmp_path, "sp.cfg",
        "B = 0.1\nA_grid = 1.1\nN_list = 2\nsectors = 0, 2\nlevels = 1\n"
        "n_max = 12\ndump_blocks = true\n",
    )
    out = tmp_path / "out"
    assert main(["spectrum-sweep", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "block_N2_A1.1_k2.csv")
    assert header == ["row", "col", "re", "im"]
    dim = 12 + 1 - 2
    assert len(rows) == 3 * dim - 2  # tridiagonal triplets
    manifest = json.loads((out / "manifest.json").read_text())
    assert "block_N2_A1.1_k0.csv" in manifest["outputs"]


def test_collapse_sweep_emits_minima(tmp_path):
    cfg = write(
        tmp_path, "c.cfg",
        "B = 0.1\nA_grid = 0.95, 1.05, 1.15\nN_list = 5\nsectors = 0\nlevels = 2\n",
    )
    out = tmp_path / "out"
    assert main(["collapse-sweep", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "collapse_minima.csv")
    assert header == ["N", "k", "j", "min_abs_re", "argmin_A"]
    assert len(rows) == 2  # j = 0, 1


def test_hysteresis_scenario(tmp_path):
    cfg = write(tmp_path, "h.cfg", "B = 0.1\nN_list = 1\nt_f = 50\nsamples = 41\n")
    out = tmp_path / "out"
    assert main(["hysteresis", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "hysteresis.csv")
    assert header == ["t", "A_over_gamma", "direction", "n_mean", "n_mean_over_N"]
    assert len(rows) == 2 * 41
    header, rows = read_csv(out / "hysteresis_summary.csv")
    assert header == ["N", "loop_area", "n_max"]
    assert float(rows[0][1]) > 0.0


def test_trajectory_scenario_counting(tmp_path):
    cfg = write(
        tmp_path, "t.cfg",
        "B = 0.1\nA = 1.25\nN = 1\nkind = counting\nn_traj = 8\nt_f = 2.0\ndt = 0.002\n"
        "seed = 7\nsave_trajectories = 2\nrecord_every = 10\nbins = 10\n",
    )
    out = tmp_path / "out"
    assert main(["trajectory", "--config", str(cfg), "--output-dir", str(out)]) == 0
    for name in ("trajectory_000.csv", "trajectory_001.csv", "jumps_000.csv",
                 "ensemble.csv", "histogram.csv"):
        assert (out / name).exists()
    header, rows = read_csv(out / "ensemble.csv")
    assert header == ["t", "n_mean", "n_stderr", "x_mean", "x_stderr"]
    hh, hrows = read_csv(out / "histogram.csv")
    assert abs(sum(float(r[2]) for r in hrows) - 1.0) < 1e-12


def test_trajectory_seed_flag_overrides(tmp_path):
    cfg = write(
        tmp_path, "t.cfg",
        "B = 0.1\nA = 1.1\nkind = counting\nn_traj = 2\nt_f = 1.0\ndt = 0.002\nseed = 7\n",
    )
    o1, o2, o3 = tmp_path / "o1", tmp_path / "o2", tmp_path / "o3"
    assert main(["trajectory", "--config", str(cfg), "--output-dir", str(o1)]) == 0
    assert main(["trajectory", "--config", str(cfg), "--output-dir", str(o2), "--seed", "8"]) == 0
    assert main(["trajectory", "--config", str(cfg), "--output-dir", str(o3), "--seed", "8"]) == 0
    a = (o1 / "trajectory_000.csv").read_bytes()
    b = (o2 / "trajectory_000.csv").read_bytes()
    c = (o3 / "trajectory_000.csv").read_bytes()
    assert a != b and b == c


def test_wigner_scenario(tmp_path):
    cfg = write(
        tmp_path, "w.cfg",
        "B = 0.1\nA = 1.25\nN = 1\nsource = eigenmatrix\nk = 1\nj = 0\n"
        "grid_points = 9\ngrid_extent = 2.5\n",
    )
    out = tmp_path / "out"
    assert main(["wigner", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "wigner.csv")
    assert header == ["re_alpha", "im_alpha", "w_value"]
    assert len(rows) == 81


def test_pfunction_scenario(tmp_path):
    cfg = write(tmp_path, "p.cfg", "B = 0.1\nA = 1.25\nN = 10\nr_points = 50\n")
    out = tmp_path / "out"
    assert main(["pfunction", "--config", str(cfg), "--output-dir", str(out)]) == 0
    header, rows = read_csv(out / "pfunction.csv")
    assert header == ["r", "p_value"]
    assert len(rows) == 50
    vals = np.array([float(r[1]) for r in rows])
    assert np.all(vals >= 0.0)


def test_manifest_contents(tmp_path):
    cfg = write(tmp_path, "s.cfg", "B = 0.1\nA_grid = 1.1\nN_list = 5\n")
    out = tmp_path / "out"
    assert main(["steady-sweep", "--config", str(cfg), "--output-dir", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "steady-sweep"
    assert manifest["version"].startswith("scully-lamb ")
    assert manifest["config"]["B"] == 0.1
    assert "wall_clock_seconds" in manifest
    assert manifest["outputs"] == ["steady.csv"]


def test_all_scenarios_have_schemas():
    assert set(SCENARIOS) == {
        "spectrum-sweep", "collapse-sweep", "steady-sweep", "hysteresis",
        "trajectory", "wigner", "pfunction", "oracle-check",
    }
