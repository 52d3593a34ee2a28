"""Command-line entry point.

Precedence of settings, lowest to highest: built-in defaults, the YAML file
given by ``--config``, the ``DRESSEDTHERMO_WORKERS`` environment variable
(worker count only), ``--set key.path=value`` overrides, and the dedicated
flags ``--seed``, ``--out-dir``, ``--workers`` and ``--gnuplot-stub``.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io
from .config import WORKERS_ENV, ConfigError, ExperimentConfig, dump_config, load_config, parse_override
from .fcs import SIGN_CONVENTION, CountingGrid, characteristic_scan, default_grid, heat_distribution
from .propagator import EvolutionSpec, TrajectoryRecord, evolve
from .pulse import pulse_table
from .steady import net_cooling_map
from .thermo import (NotHeatAbsorbingError, engine_efficiency, entropy_change, entropy_production,
                     find_plateau, integrated_heat, ts_trajectory)
from .unravel import sample_trajectories, total_variation


# ----------------------------------------------------------------------------
# sweep points (module level so worker processes can import them)

def _sweep_point(args):
    cfg, delta, a, theta0_pi = args
    pulse = cfg.pulse.spec(tau0=cfg.sweep.tau0_ps, theta0=theta0_pi * np.pi, chirp_a=a, delta0=delta)
    try:
        traj = evolve(cfg.evolution_spec(pulse))
    except Exception as exc:  # recorded, the sweep carries on
        return {"error": f"{type(exc).__name__}: {exc}"}
    out = {"heat": integrated_heat(traj),
           "entropy_change": entropy_change(traj),
           "entropy_production": entropy_production(traj, cfg.bath.temperature_K)}
    try:
        out["eta"], out["eta_over_carnot"] = engine_efficiency(traj, cfg.engine.spec())
    except NotHeatAbsorbingError:
        out["eta"] = out["eta_over_carnot"] = float("nan")
    return out


def run_points(fn, tasks, workers: int):
    """Evaluate ``fn`` over ``tasks`` in order, optionally in a process pool."""
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def _delta_tag(delta: float) -> str:
    return f"{delta:+g}".replace(".", "p")


# ----------------------------------------------------------------------------
# commands; each returns the number of failed points

def cmd_pulse_preview(cfg: ExperimentConfig, out: Path, man: io.Manifest) -> int:
    spec = cfg.evolution_spec()
    tab = pulse_table(cfg.pulse.spec(), spec.sample_times())
    cols = ["t_ps", "omega_ps_inv", "delta_ps_inv", "lambda_ps_inv",
            "half_lambda_plus_ps_inv", "half_lambda_minus_ps_inv", "theta_rad"]
    rows = zip(tab["t_ps"], tab["omega_ps_inv"], tab["delta_ps_inv"], tab["lambda_ps_inv"],
               0.5 * tab["lambda_ps_inv"], -0.5 * tab["lambda_ps_inv"], tab["theta_rad"])
    man.add_output(io.write_csv(out / "pulse_preview.csv", cols, rows, _pulse_header(cfg)))
    _stub(cfg, out, "pulse_preview.csv", "t_ps", ["lambda_ps_inv", "omega_ps_inv", "delta_ps_inv"])
    return 0


def _pulse_header(cfg):
    p = cfg.pulse
    return {"pulse": {"tau0_ps": p.tau0_ps, "theta0_pi": p.theta0_pi, "chirp_a_ps2": p.chirp_a_ps2,
                      "delta_ps_inv": p.delta_ps_inv, "t_center_ps": p.t_center_ps}}


def _bath_header(cfg):
    b = cfg.bath
    return {"bath": {"temperature_K": b.temperature_K, "form": b.form, "A_ps2": b.A_ps2,
                     "omega_c_ps_inv": b.omega_c_ps_inv}}


def _evolve(cfg) -> tuple[EvolutionSpec, TrajectoryRecord]:
    spec = cfg.evolution_spec()
    return spec, evolve(spec)


def cmd_evolve(cfg, out, man) -> int:
    spec, traj = _evolve(cfg)
    header = {**_pulse_header(cfg), **_bath_header(cfg), "heat_sign": SIGN_CONVENTION}
    man.add_output(io.write_csv(out / "trajectory.csv", TrajectoryRecord.COLUMNS, traj.rows(), header))
    summary = {"heat_ps_inv": integrated_heat(traj), "entropy_change": entropy_change(traj),
               "entropy_production": entropy_production(traj, cfg.bath.temperature_K),
               "final_rho": {"re": traj.final_rho.real.tolist(), "im": traj.final_rho.imag.tolist()},
               "nfev": traj.nfev}
    try:
        summary["eta"], summary["eta_over_carnot"] = engine_efficiency(traj, cfg.engine.spec())
    except NotHeatAbsorbingError:
        summary["eta"] = summary["eta_over_carnot"] = None
    man.add_output(io.write_json(out / "evolve_summary.json", summary))
    _stub(cfg, out, "trajectory.csv", "t_ps", ["p_plus", "p_minus", "cumulative_heat_ps_inv"])
    return 0


def _sweep(cfg, out, man, kind: str) -> int:
    sw = cfg.sweep
    avals, tvals = sw.chirp_a_ps2.values(), sw.theta0_pi.values()
    failed = 0
    for delta in sw.delta_ps_inv:
        delta = float(delta)
        tasks = [(cfg, delta, float(a), float(th)) for a in avals for th in tvals]
        results = run_points(_sweep_point, tasks, cfg.workers)
        rows = []
        for (_, _, a, th), r in zip(tasks, results):
            if "error" in r:
                failed += 1
                man.add_failure({"delta_ps_inv": delta, "chirp_a_ps2": a, "theta0_over_pi": th}, r["error"])
                rows.append((a, th, np.nan, np.nan, r["error"].replace(",", ";")))
            elif kind == "heat":
                rows.append((a, th, r["heat"], r["entropy_production"], "ok"))
            else:
                rows.append((a, th, r["eta_over_carnot"], r["heat"], "ok"))
        if kind == "heat":
            cols = ["chirp_a_ps2", "theta0_over_pi", "mean_heat_ps_inv", "entropy_production", "status"]
        else:
            cols = ["chirp_a_ps2", "theta0_over_pi", "eta_over_carnot", "mean_heat_ps_inv", "status"]
        name = f"{kind}_sweep_delta{_delta_tag(delta)}.csv"
        header = {"tau0_ps": sw.tau0_ps, "delta_ps_inv": delta, **_bath_header(cfg)}
        if kind == "efficiency":
            header["engine"] = {"hot_T_K": cfg.engine.hot_T_K, "cold_T_K": cfg.engine.cold_T_K,
                                "eta_carnot": cfg.engine.spec().carnot}
        man.add_output(io.write_csv(out / name, cols, rows, header))
        _stub(cfg, out, name, "chirp_a_ps2", [cols[2]], surface=True)
    return failed


def cmd_heat_sweep(cfg, out, man) -> int:
    return _sweep(cfg, out, man, "heat")


def cmd_efficiency_sweep(cfg, out, man) -> int:
    return _sweep(cfg, out, man, "efficiency")


def cmd_ts(cfg, out, man) -> int:
    _, traj = _evolve(cfg)
    rows = ts_trajectory(traj)
    header = {**_pulse_header(cfg), **_bath_header(cfg)}
    man.add_output(io.write_csv(out / "ts.csv", ["t_ps", "t_eff_K", "entropy_vn", "entropy_diag"],
                                rows, header))
    hot = cfg.bath.temperature_K
    t0, t1, length = find_plateau(traj.t, traj.t_eff, below=hot, band=0.2)
    tau = cfg.pulse.spec().params().tau
    man.add_output(io.write_json(out / "ts_summary.json", {
        "plateau_start_ps": t0, "plateau_end_ps": t1, "plateau_length_ps": length,
        "plateau_length_over_tau": length / tau, "entropy_change": entropy_change(traj)}))
    _stub(cfg, out, "ts.csv", "t_ps", ["t_eff_K", "entropy_vn"])
    return 0


def cmd_heat_distribution(cfg, out, man) -> int:
    spec = cfg.evolution_spec()
    c = cfg.counting
    grid = default_grid(spec, n=c.n, range_factor=c.range_factor)
    grid = CountingGrid(grid.du, grid.n, c.window)
    times = [float(t) for t in c.times_ps]
    scans = characteristic_scan(spec, grid, t=times) if times else [characteristic_scan(spec, grid)]
    summary = []
    for k, scan in enumerate(scans):
        dist = heat_distribution(scan)
        cols = ["q_ps_inv", "probability_density"]
        data = [dist.q_values, dist.probabilities]
        if cfg.output.meV_column:
            cols.append("q_meV")
            data.append(dist.in_mev())
        t_label = spec.span[1] if scan.t is None else scan.t
        header = {"grid": {"du": grid.du, "n": grid.n, "q_step_ps_inv": grid.q_step,
                           "q_range_ps_inv": grid.q_range, "window": grid.window},
                  "sign_convention": SIGN_CONVENTION, "t_ps": t_label, "aliased": dist.aliased,
                  **_pulse_header(cfg), **_bath_header(cfg)}
        name = "heat_distribution.csv" if len(scans) == 1 else f"heat_distribution_{k:02d}.csv"
        man.add_output(io.write_csv(out / name, cols, zip(*data), header))
        summary.append({"file": name, "t_ps": t_label, "mean_ps_inv": dist.mean,
                        "variance": dist.variance, "negative_mass": dist.mass_below(0.0),
                        **dist.meta})
        _stub(cfg, out, name, "q_ps_inv", ["probability_density"])
    man.add_output(io.write_json(out / "heat_distribution_summary.json", summary))
    return 0


def cmd_cooling_map(cfg, out, man) -> int:
    res = net_cooling_map(cfg.cw.delta_ps_inv.values(), cfg.cw.omega_ps_inv.values(),
                          cfg.cw.template(), cfg.absorption.model())
    cols = ["delta_ps_inv", "omega_ps_inv", "cooling_W", "heating_W", "net_W", "residual"]
    rows = zip(*(res[c] for c in cols))
    if not np.all(res["residual"] < 1e-10):
        man.add_failure({"cooling_map": "steady-state residual"},
                        f"max residual {np.max(res['residual']):.3g}")
    cw = cfg.cw
    header = {"cw": {"gamma_sp_ns_inv": cw.gamma_sp_ns_inv, "temperature_K": cw.temperature_K,
                     "form": cw.form, "A_ps2": cw.A_ps2, "omega_c_ps_inv": cw.omega_c_ps_inv},
              "net_sign": "positive net_W means net cooling"}
    man.add_output(io.write_csv(out / "cooling_map.csv", cols, rows, header))
    _stub(cfg, out, "cooling_map.csv", "delta_ps_inv", ["net_W"], surface=True)
    return len(man.failures)


def cmd_oracle_mc(cfg, out, man) -> int:
    spec = cfg.evolution_spec()
    stats = sample_trajectories(spec, cfg.oracle.n_trajectories, seed=cfg.seed)
    dist = heat_distribution(characteristic_scan(spec, default_grid(spec, cfg.counting.n,
                                                                    cfg.counting.range_factor)))
    k = cfg.oracle.coarsen
    q, dq = dist.q_values, dist.dq
    n = len(q) // k * k
    edges = np.append(q[:n:k] - 0.5 * dq, q[n - 1] + 0.5 * dq)
    mc = stats.histogram(edges)
    fcs = (dist.probabilities[:n] * dq).reshape(-1, k).sum(axis=1)
    man.add_output(io.write_csv(out / "oracle_histogram.csv",
                                ["q_left_ps_inv", "q_right_ps_inv", "mc_probability", "fcs_probability"],
                                zip(edges[:-1], edges[1:], mc, fcs),
                                {"seed": cfg.seed, "n": stats.n, "sign_convention": SIGN_CONVENTION}))
    ref = evolve(spec)
    rho_mc, err = stats.final_rho(), stats.final_rho_stderr()
    summary = {**stats.summary(), "fcs_mean_ps_inv": dist.mean,
               "integrated_heat_ps_inv": integrated_heat(ref),
               "total_variation": total_variation(stats, dist, k),
               "final_rho_mc": {"re": rho_mc.real.tolist(), "im": rho_mc.imag.tolist()},
               "final_rho_stderr": {"re": err.real.tolist(), "im": err.imag.tolist()},
               "final_rho_evolve": {"re": ref.final_rho.real.tolist(), "im": ref.final_rho.imag.tolist()}}
    man.add_output(io.write_json(out / "oracle_stats.json", summary))
    _stub(cfg, out, "oracle_histogram.csv", "q_left_ps_inv", ["mc_probability", "fcs_probability"])
    return 0


def cmd_selftest(cfg, out, man) -> int:
    from .selftest import run
    return run(verbose=True)


COMMANDS = {
    "pulse-preview": (cmd_pulse_preview, "drive, detuning and dressed splitting versus time"),
    "evolve": (cmd_evolve, "full master-equation trajectory and heat summary"),
    "heat-sweep": (cmd_heat_sweep, "mean absorbed heat over (chirp, pulse area), one CSV per detuning"),
    "efficiency-sweep": (cmd_efficiency_sweep, "engine efficiency over (chirp, pulse area)"),
    "ts": (cmd_ts, "effective temperature and entropy versus time"),
    "heat-distribution": (cmd_heat_distribution, "distribution of absorbed heat from counting statistics"),
    "cooling-map": (cmd_cooling_map, "steady-state cooling power under continuous driving"),
    "oracle-mc": (cmd_oracle_mc, "quantum-jump Monte Carlo cross-check of the heat distribution"),
    "selftest": (cmd_selftest, "quick invariant checks"),
}


# ----------------------------------------------------------------------------
# gnuplot stubs

def _stub(cfg, out: Path, csv_name: str, xcol: str, ycols: list[str], surface: bool = False):
    if not cfg.output.gnuplot_stub:
        return
    header, cols, _ = io.read_csv(out / csv_name)
    ix = cols.index(xcol) + 1
    lines = ["set datafile separator ','", "set key autotitle columnhead",
             f"set xlabel '{xcol}'"]
    if surface:
        iy = 2 if ix == 1 else 1
        iz = cols.index(ycols[0]) + 1
        lines += [f"set ylabel '{cols[iy - 1]}'", "set pm3d map", "set dgrid3d",
                  f"splot '{csv_name}' using {ix}:{iy}:{iz} with pm3d title '{ycols[0]}'"]
    else:
        parts = [f"'{csv_name}' using {ix}:{cols.index(y) + 1} with lines title '{y}'" for y in ycols]
        lines.append("plot " + ", \\\n     ".join(parts))
    lines.append("pause -1")
    (out / (Path(csv_name).stem + ".gp")).write_text("\n".join(lines) + "\n", encoding="utf-8")


# ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML experiment configuration")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")
    common.add_argument("--out-dir", type=Path, help="output directory (overrides config)")
    common.add_argument("--workers", type=int, help=f"worker processes (overrides {WORKERS_ENV})")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config key, e.g. --set pulse.tau0_ps=2")
    common.add_argument("--gnuplot-stub", action="store_true",
                        help="also write a gnuplot script next to each CSV")
    common.add_argument("--print-config", action="store_true",
                        help="print the resolved config and exit")
    parser = argparse.ArgumentParser(prog="dressedthermo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_, description=help_)
    return parser


def resolve_config(args) -> ExperimentConfig:
    overrides = {}
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            overrides["workers"] = int(env)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV}={env!r} is not an integer") from None
    for item in args.set:
        k, v = parse_override(item)
        overrides[k] = v
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out_dir is not None:
        overrides["output.directory"] = str(args.out_dir)
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.gnuplot_stub:
        overrides["output.gnuplot_stub"] = True
    return load_config(args.config, overrides)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.print_config:
        sys.stdout.write(dump_config(cfg))
        return 0
    out = Path(cfg.output.directory)
    out.mkdir(parents=True, exist_ok=True)
    man = io.Manifest(args.command, cfg.to_dict(), argv)
    fn = COMMANDS[args.command][0]
    try:
        failed = fn(cfg, out, man)
    except Exception as exc:
        man.add_failure({"command": args.command}, f"{type(exc).__name__}: {exc}")
        man.write(out)
        traceback.print_exc()
        print(f"{args.command} failed with config {args.config or '<defaults>'}: {exc}",
              file=sys.stderr)
        return 1
    man.write(out)
    if failed:
        print(f"{args.command}: {failed} point(s) failed; see manifest", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
