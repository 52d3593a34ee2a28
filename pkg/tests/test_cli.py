import json
import math

import numpy as np
import pytest

from dressedthermo import cli
from dressedthermo.config import ConfigError, load_config, parse_config
from dressedthermo.io import read_csv

SMALL_SWEEP = ["--set", "sweep.chirp_a_ps2=[-10, 10, 3]", "--set", "sweep.theta0_pi=[0, 4, 2]",
               "--set", "sweep.delta_ps_inv=[0.0, 2.5]", "--set", "sweep.tau0_ps=1.0",
               "--set", "evolution.n_samples=11"]


def run(args, tmp_path, sub="out"):
    out = tmp_path / sub
    code = cli.main(args + ["--out-dir", str(out)])
    return code, out


def test_defaults_round_trip():
    cfg = parse_config(None)
    assert cfg.pulse.tau0_ps == 0.5 and cfg.pulse.theta0_pi == 9.0
    assert cfg.counting.n == 1024
    assert cfg.sweep.chirp_a_ps2.num == 41 and cfg.sweep.theta0_pi.num == 40
    assert cfg.engine.spec().carnot == pytest.approx(0.865)


def test_unknown_key_reports_path_and_line():
    text = "seed: 3\npulse:\n  tau0_ps: 2\n  theta0: 6\n"
    with pytest.raises(ConfigError, match=r"pulse\.theta0 \(line 4\): unknown key"):
        parse_config(text)


@pytest.mark.parametrize("text,match", [
    ("bath:\n  temperature_K: -3\n", "temperature_K"),
    ("engine:\n  hot_T_K: 2\n  cold_T_K: 3\n", "cold_T_K"),
    ("counting:\n  n: 1000\n", "power of two"),
    ("evolution:\n  rtol: 0.5\n", "tolerances"),
    ("seed: abc\n", "expected int"),
    ("pulse: 3\n", "expected a mapping"),
])
def test_validation_errors(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_precedence(tmp_path, monkeypatch):
    path = tmp_path / "c.yaml"
    path.write_text("seed: 1\nworkers: 1\npulse:\n  tau0_ps: 2.0\n")
    monkeypatch.setenv("DRESSEDTHERMO_WORKERS", "3")
    args = cli.build_parser().parse_args(
        ["evolve", "--config", str(path), "--set", "pulse.tau0_ps=4", "--seed", "9"])
    cfg = cli.resolve_config(args)
    assert (cfg.seed, cfg.workers, cfg.pulse.tau0_ps) == (9, 3, 4.0)
    args = cli.build_parser().parse_args(["evolve", "--config", str(path), "--workers", "2"])
    assert cli.resolve_config(args).workers == 2


def test_config_error_exit_code(tmp_path, capsys):
    code, _ = run(["evolve", "--set", "pulse.bogus=1"], tmp_path)
    assert code == 2
    assert "pulse.bogus" in capsys.readouterr().err


def test_pulse_preview_resonant_unchirped(tmp_path):
    code, out = run(["pulse-preview", "--set", "pulse.chirp_a_ps2=0", "--set", "pulse.delta_ps_inv=0",
                     "--set", "pulse.t_center_ps=1.5", "--gnuplot-stub"], tmp_path)
    assert code == 0
    _, cols, data = read_csv(out / "pulse_preview.csv")
    t, om, lam = data[:, 0], data[:, cols.index("omega_ps_inv")], data[:, cols.index("lambda_ps_inv")]
    np.testing.assert_array_equal(lam, om)
    np.testing.assert_allclose(lam, lam[::-1], atol=1e-9)
    np.testing.assert_allclose(t - 1.5, -(t[::-1] - 1.5), atol=1e-9)
    np.testing.assert_array_equal(data[:, cols.index("half_lambda_plus_ps_inv")], 0.5 * lam)
    assert (out / "pulse_preview.gp").exists()
    manifest = json.loads((out / "manifest_pulse-preview.json").read_text(encoding="utf-8"))
    assert manifest["config"]["pulse"]["chirp_a_ps2"] == 0.0
    assert {"code_version", "wall_time_s", "outputs", "failures"} <= set(manifest)


def test_heat_sweep_zero_area_row_and_determinism(tmp_path):
    code, out = run(["heat-sweep"] + SMALL_SWEEP, tmp_path, "a")
    assert code == 0
    code, out2 = run(["heat-sweep"] + SMALL_SWEEP + ["--workers", "2"], tmp_path, "b")
    assert code == 0
    for name in ("heat_sweep_delta+0.csv", "heat_sweep_delta+2p5.csv"):
        assert (out / name).read_bytes() == (out2 / name).read_bytes()
    _, cols, data = read_csv(out / "heat_sweep_delta+0.csv")
    assert cols[:3] == ["chirp_a_ps2", "theta0_over_pi", "mean_heat_ps_inv"]
    zero = data[:, 1] == 0
    assert zero.sum() == 3
    np.testing.assert_array_equal(data[zero, 2], 0.0)
    # resonant column: heat follows the chirp sign
    q = {a: v for a, th, v in data[:, :3] if th == 4}
    assert q[10.0] > 0 > q[-10.0]


def test_sweep_records_failures_and_continues(tmp_path, monkeypatch):
    real = cli.evolve

    def flaky(spec, *a, **k):
        if spec.pulse.chirp_a == 0.0 and spec.pulse.theta0 > 0:
            raise RuntimeError("synthetic failure")
        return real(spec, *a, **k)

    monkeypatch.setattr(cli, "evolve", flaky)
    code, out = run(["heat-sweep"] + SMALL_SWEEP + ["--set", "sweep.delta_ps_inv=[0.0]"], tmp_path)
    assert code == 1
    header, cols, data = read_csv(out / "heat_sweep_delta+0.csv")
    assert data.shape[0] == 6
    failed = (data[:, 0] == 0) & (data[:, 1] == 4)
    assert np.isnan(data[failed, 2]).all() and np.isfinite(data[~failed, 2]).all()
    manifest = json.loads((out / "manifest_heat-sweep.json").read_text(encoding="utf-8"))
    assert len(manifest["failures"]) == 1
    assert "synthetic failure" in manifest["failures"][0]["error"]


def test_efficiency_sweep_marks_non_absorbing_points(tmp_path):
    code, out = run(["efficiency-sweep"] + SMALL_SWEEP + ["--set", "sweep.delta_ps_inv=[0.0]"], tmp_path)
    assert code == 0
    header, cols, data = read_csv(out / "efficiency_sweep_delta+0.csv")
    eta = data[:, cols.index("eta_over_carnot")]
    q = data[:, cols.index("mean_heat_ps_inv")]
    assert np.all(np.isnan(eta[q <= 0]))
    assert np.all(eta[q > 0] <= 1 + 1e-9)
    assert "eta_carnot" in header["engine"]


def test_evolve_and_ts(tmp_path):
    args = ["--set", "pulse.tau0_ps=1", "--set", "pulse.theta0_pi=4", "--set", "pulse.chirp_a_ps2=5",
            "--set", "pulse.delta_ps_inv=1"]
    code, out = run(["evolve"] + args, tmp_path)
    assert code == 0
    summary = json.loads((out / "evolve_summary.json").read_text(encoding="utf-8"))
    _, cols, data = read_csv(out / "trajectory.csv")
    assert summary["heat_ps_inv"] == data[-1, cols.index("cumulative_heat_ps_inv")]
    code, out = run(["ts"] + args, tmp_path)
    assert code == 0
    _, cols, data = read_csv(out / "ts.csv")
    assert cols == ["t_ps", "t_eff_K", "entropy_vn", "entropy_diag"]


def test_heat_distribution_command(tmp_path):
    args = ["--set", "pulse.tau0_ps=1", "--set", "pulse.theta0_pi=4", "--set", "pulse.chirp_a_ps2=5",
            "--set", "pulse.delta_ps_inv=1", "--set", "counting.n=256", "--set", "output.meV_column=true"]
    code, out = run(["heat-distribution"] + args, tmp_path)
    assert code == 0
    header, cols, data = read_csv(out / "heat_distribution.csv")
    assert cols == ["q_ps_inv", "probability_density", "q_meV"]
    assert "phonons->emitter" in header["sign_convention"]
    assert json.loads(header["grid"])["n"] == 256
    dq = data[1, 0] - data[0, 0]
    assert np.sum(data[:, 1]) * dq == pytest.approx(1.0, abs=1e-6)
    code, out = run(["heat-distribution"] + args + ["--set", "counting.times_ps=[0.0, 5.0]"], tmp_path, "snap")
    assert code == 0
    assert (out / "heat_distribution_00.csv").exists() and (out / "heat_distribution_01.csv").exists()


def test_cooling_map_command(tmp_path):
    code, out = run(["cooling-map", "--set", "cw.delta_ps_inv=[-5, 5, 5]",
                     "--set", "cw.omega_ps_inv=[0.1, 1, 3]"], tmp_path)
    assert code == 0
    _, cols, data = read_csv(out / "cooling_map.csv")
    assert cols[:5] == ["delta_ps_inv", "omega_ps_inv", "cooling_W", "heating_W", "net_W"]
    assert data.shape == (15, 6)
    np.testing.assert_array_equal(data[:3, 0], -5.0)
    np.testing.assert_array_equal(data[:3, 1], [0.1, 0.55, 1.0])


def test_oracle_command(tmp_path):
    args = ["--set", "pulse.tau0_ps=1", "--set", "pulse.theta0_pi=4", "--set", "pulse.chirp_a_ps2=5",
            "--set", "pulse.delta_ps_inv=1", "--set", "oracle.n_trajectories=300",
            "--set", "counting.n=256", "--seed", "4"]
    code, out = run(["oracle-mc"] + args, tmp_path)
    assert code == 0
    stats = json.loads((out / "oracle_stats.json").read_text(encoding="utf-8"))
    assert stats["n"] == 300 and stats["seed"] == 4
    _, cols, data = read_csv(out / "oracle_histogram.csv")
    assert data[:, cols.index("mc_probability")].sum() == pytest.approx(1.0)
    code, out2 = run(["oracle-mc"] + args, tmp_path, "again")
    assert (out / "oracle_histogram.csv").read_bytes() == (out2 / "oracle_histogram.csv").read_bytes()


def test_selftest_command(tmp_path, capsys):
    code, _ = run(["selftest"], tmp_path)
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_yaml_file_loading(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text("pulse:\n  tau0_ps: 2.0\n  theta0_pi: 6\n  chirp_a_ps2: 0\nsweep:\n"
                    "  chirp_a_ps2: {start: -20, stop: 20, num: 9}\n")
    cfg = load_config(path)
    assert cfg.pulse.spec().theta0 == pytest.approx(6 * math.pi)
    np.testing.assert_allclose(cfg.sweep.chirp_a_ps2.values(), np.linspace(-20, 20, 9))
