"""Batch front-end: config-driven scenario runner with CSV/JSON artifacts.

One flat key-value config file describes one run; the scenario name is the
subcommand.  Every run writes its CSV tables plus a manifest.json holding
the fully resolved config, the toolkit version and the wall-clock time.
Floats are written with 17 significant digits so reruns of an identical
config (same seed) produce byte-identical CSV bodies.

    scully-lamb <scenario> --config run.cfg [--output-dir DIR]
                [--threads K] [--seed S]

Scenarios: spectrum-sweep, collapse-sweep, steady-sweep, hysteresis,
trajectory, wigner, pfunction, oracle-check.  All rate inputs are in units
of Gamma.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .model import ModelParams, apply_scaling, semiclassical_nss, wgs_check
from .liouvillian import build_full_superoperator, build_sector_block, trace_functional
from .spectra import auto_n_max, collapse_sweep, eigendecompose, liouvillian_gap, sector_sweep
from .steady_state import birth_death_product, fano, g2_zero, moments, solve_steady
from .dynamics import hysteresis
from .trajectories import (
    coherent_state,
    counting_ensemble,
    counting_trajectory,
    fock_state,
    homodyne_ensemble,
    homodyne_trajectory,
    trajectory_histogram,
)
from .phase_space import grid_axes, p_ss_radial, wigner_of_matrix
from .liouvillian import embed_sector_vector

__all__ = ["main", "run", "load_config", "ConfigError", "SCENARIOS"]

FLOAT_FMT = "%.17g"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Key:
    parse: object
    default: object = None
    required: bool = False
    help: str = ""


def _parse_float(s): return float(s)
def _parse_int(s): return int(s)
def _parse_str(s): return s
def _parse_bool(s):
    low = s.strip().lower()
    if low in ("true", "yes", "1"): return True
    if low in ("false", "no", "0"): return False
    raise ValueError(f"not a boolean: {s!r}")
def _parse_floats(s): return [float(x) for x in s.split(",") if x.strip()]
def _parse_ints(s): return [int(x) for x in s.split(",") if x.strip()]


_COMMON = {
    "A": Key(_parse_float, 1.25, help="gain in units of Gamma"),
    "B": Key(_parse_float, required=True, help="gain saturation in units of Gamma"),
    "gamma": Key(_parse_float, 1.0),
    "eta": Key(_parse_float, 0.0),
    "omega": Key(_parse_float, 0.0),
    "n_max": Key(_parse_int, 0, help="Fock cutoff; 0 selects max(30, ceil(4 n_ss))"),
    "output_dir": Key(_parse_str, ""),
}

SCENARIOS: dict[str, dict[str, Key]] = {
    "spectrum-sweep": {
        **_COMMON,
        "A_grid": Key(_parse_floats, required=True),
        "N_list": Key(_parse_floats, [1.0]),
        "sectors": Key(_parse_ints, [0, 1, 2, 3]),
        "levels": Key(_parse_int, 1),
        "dump_blocks": Key(_parse_bool, False,
                           help="also write each sector block as sparse-triplet CSV"),
    },
    "collapse-sweep": {
        **_COMMON,
        "A_grid": Key(_parse_floats, required=True),
        "N_list": Key(_parse_floats, [25.0, 50.0, 100.0]),
        "sectors": Key(_parse_ints, [0, 1, 2]),
        "levels": Key(_parse_int, 3),
    },
    "steady-sweep": {
        **_COMMON,
        "A_grid": Key(_parse_floats, required=True),
        "N_list": Key(_parse_floats, [1.0]),
        "eta_list": Key(_parse_floats, []),
    },
    "hysteresis": {
        **_COMMON,
        "N_list": Key(_parse_floats, [1.0, 10.0, 100.0]),
        "t_f": Key(_parse_float, 200.0),
        "samples": Key(_parse_int, 201),
    },
    "trajectory": {
        **_COMMON,
        "kind": Key(_parse_str, "counting", help="counting | homodyne"),
        "n_traj": Key(_parse_int, 1),
        "t_f": Key(_parse_float, required=True),
        "dt": Key(_parse_float, required=True),
        "seed": Key(_parse_int, 2024),
        "beta_ref": Key(_parse_floats, []),
        "N": Key(_parse_float, 1.0),
        "psi0": Key(_parse_str, "vacuum", help="vacuum | coherent | coherent-ss"),
        "alpha_re": Key(_parse_float, 0.0),
        "alpha_im": Key(_parse_float, 0.0),
        "record_every": Key(_parse_int, 1),
        "save_trajectories": Key(_parse_int, 3),
        "burn_in": Key(_parse_float, 0.0),
        "bins": Key(_parse_int, 50),
        "ramp": Key(_parse_str, "none", help="none | up | down"),
    },
    "wigner": {
        **_COMMON,
        "N": Key(_parse_float, 1.0),
        "source": Key(_parse_str, "steady", help="steady | eigenmatrix"),
        "k": Key(_parse_int, 0),
        "j": Key(_parse_int, 0),
        "grid_extent": Key(_parse_float, 0.0, help="0 selects 1.2 sqrt(n_max)"),
        "grid_points": Key(_parse_int, 61),
    },
    "pfunction": {
        **_COMMON,
        "N": Key(_parse_float, 1.0),
        "r_max": Key(_parse_float, 0.0, help="0 selects 1.5 sqrt(max(n_ss, 4))"),
        "r_points": Key(_parse_int, 200),
    },
    "oracle-check": {
        **_COMMON,
        "tolerance": Key(_parse_float, 1e-8),
    },
}


def load_config(path: Path, scenario: str) -> dict:
    """Parse and validate a flat key = value config for one scenario."""
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    schema = SCENARIOS[scenario]
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key == "scenario":
            if value != scenario:
                raise ConfigError(
                    f"{path}:{lineno}: config is for scenario {value!r}, not {scenario!r}"
                )
            continue
        if key not in schema:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} for {scenario}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = (value, lineno)
    config = {}
    for key, spec in schema.items():
        if key in raw:
            value, lineno = raw[key]
            try:
                config[key] = spec.parse(value)
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
        elif spec.required:
            raise ConfigError(f"{path}: missing required key {key!r} for {scenario}")
        else:
            config[key] = spec.default
    _validate_config(scenario, config, path)
    return config


def _validate_config(scenario: str, config: dict, path) -> None:
    for key in ("A_grid", "N_list"):
        if key in config and not config[key]:
            raise ConfigError(f"{path}: {key} must be non-empty")
    if scenario == "trajectory":
        if config["kind"] not in ("counting", "homodyne"):
            raise ConfigError(f"{path}: kind must be counting or homodyne")
        if config["psi0"] not in ("vacuum", "coherent", "coherent-ss"):
            raise ConfigError(f"{path}: psi0 must be vacuum, coherent or coherent-ss")
        if config["ramp"] not in ("none", "up", "down"):
            raise ConfigError(f"{path}: ramp must be none, up or down")
        if config["beta_ref"] and len(config["beta_ref"]) != 3:
            raise ConfigError(f"{path}: beta_ref needs exactly 3 amplitudes")
    if scenario == "wigner" and config["source"] not in ("steady", "eigenmatrix"):
        raise ConfigError(f"{path}: source must be steady or eigenmatrix")


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT % float(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _base_params(config: dict, n_max: int | None = None) -> ModelParams:
    resolved = config["n_max"] or n_max or 30
    return ModelParams(
        A=config["A"] * config["gamma"],
        B=config["B"],
        gamma=config["gamma"],
        eta=config["eta"],
        omega=config["omega"],
        n_max=resolved,
    )


def _scaled_point(config, A_over_gamma, N, eta=None, n_max=None) -> ModelParams:
    base = ModelParams(
        A=1.0, B=config["B"], gamma=config["gamma"],
        eta=config["eta"] if eta is None else eta,
        omega=config["omega"], n_max=30,
    )
    scaled = apply_scaling(base, N, mu=0.0)
    scaled = replace(scaled, A=A_over_gamma * scaled.gamma)
    if n_max is None:
        n_max = config["n_max"] or auto_n_max(scaled)
    return scaled.with_n_max(n_max)


# ---------------------------------------------------------------- scenarios

def _run_spectrum_sweep(config, outdir, executor, extras):
    base = _base_params(config, n_max=30)
    rows = sector_sweep(
        base, config["A_grid"], config["N_list"], config["sectors"],
        list(range(config["levels"])), executor=executor,
        n_max_override=config["n_max"] or None,
    )
    write_csv(
        outdir / "spectrum.csv",
        ["N", "A_over_gamma", "k", "j", "re_lambda", "im_lambda", "spurious"],
        [
            (r.N, r.A, r.k, r.j, r.eigenvalue.real, r.eigenvalue.imag, r.spurious)
            for r in rows if not r.failed
        ],
    )
    files = ["spectrum.csv"]
    if config["dump_blocks"]:
        files += _dump_blocks(config, outdir)
    extras["n_rows"] = len(rows)
    return files


def _dump_blocks(config, outdir):
    """Sparse-triplet CSV (row, col, re, im) of every (N, A, k) sector block."""
    files = []
    for N in config["N_list"]:
        ref = _scaled_point(config, max(config["A_grid"]), N, n_max=config["n_max"] or None)
        for A in config["A_grid"]:
            params = replace(ref, A=A * ref.gamma)
            for k in config["sectors"]:
                M = build_sector_block(params, k).matrix
                rr, cc = np.nonzero(M)
                name = f"block_N{N:g}_A{A:g}_k{k}.csv"
                write_csv(
                    outdir / name,
                    ["row", "col", "re", "im"],
                    [(int(i), int(j), M[i, j].real, M[i, j].imag) for i, j in zip(rr, cc)],
                )
                files.append(name)
    return files


def _run_collapse_sweep(config, outdir, executor, extras):
    base = _base_params(config, n_max=30)
    rows, minima = collapse_sweep(
        base, config["A_grid"], config["N_list"], config["sectors"],
        list(range(config["levels"])), executor=executor,
    )
    write_csv(
        outdir / "collapse.csv",
        ["N", "A_over_gamma", "k", "j", "re_lambda", "im_lambda", "spurious"],
        [
            (r.N, r.A, r.k, r.j, r.eigenvalue.real, r.eigenvalue.imag, r.spurious)
            for r in rows if not r.failed
        ],
    )
    write_csv(
        outdir / "collapse_minima.csv",
        ["N", "k", "j", "min_abs_re", "argmin_A"],
        [(m.N, m.k, m.j, m.min_abs_re, m.argmin_A) for m in minima],
    )
    extras["n_rows"] = len(rows)
    return ["collapse.csv", "collapse_minima.csv"]


def _run_steady_sweep(config, outdir, executor, extras):
    etas = config["eta_list"] or [config["eta"]]
    rows = []
    n_max_used = {}
    def one(job):
        A_over, N, eta = job
        params = _scaled_point(config, max(config["A_grid"]), N, eta=eta)
        params = replace(params, A=A_over * params.gamma)
        state = solve_steady(build_sector_block(params, 0))
        n1 = moments(state, 1)
        return (A_over, N, eta, n1, n1 / params.N, g2_zero(state), fano(state), params.n_max)
    jobs = [(a, n, e) for e in etas for n in config["N_list"] for a in config["A_grid"]]
    results = list(executor.map(one, jobs)) if executor else [one(j) for j in jobs]
    results.sort(key=lambda r: (r[2], r[1], r[0]))
    for r in results:
        n_max_used[r[1]] = r[7]
    write_csv(
        outdir / "steady.csv",
        ["A_over_gamma", "N", "eta", "n_mean", "n_mean_over_N", "g2", "fano"],
        [r[:7] for r in results],
    )
    extras["n_max_used"] = {str(k): v for k, v in sorted(n_max_used.items())}
    return ["steady.csv"]


def _run_hysteresis(config, outdir, executor, extras):
    t_f, samples = config["t_f"], config["samples"]
    def one(N):
        params = _scaled_point(config, 1.5, N)
        return N, hysteresis(params, t_f=t_f, samples=samples)
    results = list(executor.map(one, config["N_list"])) if executor else [
        one(N) for N in config["N_list"]
    ]
    results.sort(key=lambda r: r[0])
    rows = []
    summary = []
    for N, res in results:
        t_up = (res.A - 0.5 * config["gamma"]) * t_f / config["gamma"]
        t_dn = (1.5 * config["gamma"] - res.A[::-1]) * t_f / config["gamma"]
        for t, a, nn in zip(t_up, res.A, res.n_up):
            rows.append((t, a, "up", nn * N, nn))
        for t, a, nn in zip(t_dn, res.A[::-1], res.n_down[::-1]):
            rows.append((t, a, "down", nn * N, nn))
        summary.append((N, res.loop_area, res.n_max))
    write_csv(
        outdir / "hysteresis.csv",
        ["t", "A_over_gamma", "direction", "n_mean", "n_mean_over_N"],
        rows,
    )
    write_csv(outdir / "hysteresis_summary.csv", ["N", "loop_area", "n_max"], summary)
    return ["hysteresis.csv", "hysteresis_summary.csv"]


def _traj_initial_state(config, params):
    if config["psi0"] == "vacuum":
        return fock_state(0, params.n_max)
    if config["psi0"] == "coherent":
        return coherent_state(config["alpha_re"] + 1j * config["alpha_im"], params.n_max)
    nss = semiclassical_nss(params)
    return coherent_state(math.sqrt(max(nss, 0.0)), params.n_max)


def _run_trajectory(config, outdir, executor, extras):
    params = _scaled_point(config, config["A"], config["N"])
    psi0 = _traj_initial_state(config, params)
    beta = tuple(config["beta_ref"]) if config["beta_ref"] else (0.0, 0.0, 0.0)
    if config["kind"] == "homodyne" and not config["beta_ref"]:
        b = 10.0 * math.sqrt(params.gamma)
        beta = (b, b, b)
    ramp = None
    if config["ramp"] != "none":
        g, t_f = params.gamma, config["t_f"]
        if config["ramp"] == "up":
            ramp = lambda t: 0.5 * g + g * t / t_f
        else:
            ramp = lambda t: 1.5 * g - g * t / t_f
    files = []
    seeds = np.random.SeedSequence(config["seed"]).spawn(config["n_traj"])
    runner = homodyne_trajectory if config["kind"] == "homodyne" else counting_trajectory
    kw = {"A_of_t": ramp, "record_every": config["record_every"]}
    records = []
    for i in range(min(config["save_trajectories"], config["n_traj"])):
        if config["kind"] == "homodyne":
            rec = runner(params, psi0, beta, config["t_f"], config["dt"], seeds[i], **kw)
        else:
            rec = runner(params, psi0, config["t_f"], config["dt"], seeds[i], **kw)
        records.append(rec)
        write_csv(
            outdir / f"trajectory_{i:03d}.csv",
            ["t", "n_mean", "x_mean"],
            zip(rec.t, rec.n_mean, rec.x_mean),
        )
        write_csv(outdir / f"jumps_{i:03d}.csv", ["t", "channel"], rec.jumps)
        files += [f"trajectory_{i:03d}.csv", f"jumps_{i:03d}.csv"]
    ens_fun = homodyne_ensemble if config["kind"] == "homodyne" else counting_ensemble
    if config["kind"] == "homodyne":
        ens = ens_fun(params, psi0, beta, config["t_f"], config["dt"],
                      config["n_traj"], config["seed"], **kw)
    else:
        ens = ens_fun(params, psi0, config["t_f"], config["dt"],
                      config["n_traj"], config["seed"], **kw)
    write_csv(
        outdir / "ensemble.csv",
        ["t", "n_mean", "n_stderr", "x_mean", "x_stderr"],
        zip(ens.t, ens.n_mean, ens.n_stderr, ens.x_mean, ens.x_stderr),
    )
    files.append("ensemble.csv")
    if records:
        edges, mass = trajectory_histogram(records, burn_in=config["burn_in"], bins=config["bins"])
        write_csv(
            outdir / "histogram.csv",
            ["bin_left", "bin_right", "mass"],
            zip(edges[:-1], edges[1:], mass),
        )
        files.append("histogram.csv")
    extras["beta_ref"] = list(beta)
    extras["n_max_used"] = params.n_max
    return files


def _run_wigner(config, outdir, executor, extras):
    params = _scaled_point(config, config["A"], config["N"])
    if config["source"] == "steady":
        state = solve_steady(build_sector_block(params, 0))
        M = np.diag(state.p.astype(complex))
    else:
        spec = eigendecompose(build_sector_block(params, config["k"]))
        lam = spec.physical()
        order = np.flatnonzero(~spec.spurious)
        if config["j"] >= len(order):
            raise ConfigError(f"level j={config['j']} out of range for sector {config['k']}")
        v = spec.eigenvectors[:, order[config["j"]]]
        M = embed_sector_vector(v, config["k"], params.n_max)
        if config["k"] != 0:
            M = M + M.conj().T  # symmetrized rho + rho^dag
        else:
            M = 0.5 * (M + M.conj().T)
        extras["eigenvalue"] = [lam[config["j"]].real, lam[config["j"]].imag]
    extent = config["grid_extent"] or 1.2 * math.sqrt(params.n_max)
    ax = grid_axes(extent, config["grid_points"])
    grid = wigner_of_matrix(M, ax, ax, n_max=params.n_max)
    rows = []
    for iy, aim in enumerate(grid.alpha_im):
        for ix, are in enumerate(grid.alpha_re):
            rows.append((are, aim, grid.values[iy, ix]))
    write_csv(outdir / "wigner.csv", ["re_alpha", "im_alpha", "w_value"], rows)
    extras["n_max_used"] = params.n_max
    return ["wigner.csv"]


def _run_pfunction(config, outdir, executor, extras):
    params = _scaled_point(config, config["A"], config["N"], n_max=30)
    nss = semiclassical_nss(params)
    r_max = config["r_max"] or 1.5 * math.sqrt(max(nss, 4.0))
    r = np.linspace(0.0, r_max, config["r_points"])
    p_vals = p_ss_radial(r, params)
    write_csv(outdir / "pfunction.csv", ["r", "p_value"], zip(r, p_vals))
    extras["semiclassical_nss"] = nss
    return ["pfunction.csv"]


def _run_oracle_check(config, outdir, executor, extras):
    from scipy.optimize import linear_sum_assignment

    n_max = config["n_max"] or 8
    params = _base_params(config, n_max=n_max)
    S = build_full_superoperator(params)
    w_full = np.linalg.eigvals(S)
    w_sec = np.concatenate([
        np.linalg.eigvals(build_sector_block(params, k).matrix)
        for k in range(-n_max, n_max + 1)
    ])
    cost = np.abs(w_full[:, None] - w_sec[None, :])
    rr, cc = linear_sum_assignment(cost)
    max_dev = float(cost[rr, cc].max())
    trace_norm = float(np.abs(trace_functional(n_max + 1) @ S).max())
    order = np.argsort(rr)
    write_csv(
        outdir / "oracle_check.csv",
        ["re_full", "im_full", "re_sector", "im_sector", "abs_diff"],
        [
            (w_full[i].real, w_full[i].imag, w_sec[j].real, w_sec[j].imag, cost[i, j])
            for i, j in zip(rr[order], cc[order])
        ],
    )
    extras["max_eigenvalue_deviation"] = max_dev
    extras["trace_functional_norm"] = trace_norm
    extras["tolerance"] = config["tolerance"]
    if max_dev > config["tolerance"] or trace_norm > 1e-12:
        raise RuntimeError(
            f"oracle check failed: max |dlam| = {max_dev:.3e} "
            f"(tol {config['tolerance']:.0e}), ||tr o L|| = {trace_norm:.3e}"
        )
    return ["oracle_check.csv"]


_RUNNERS = {
    "spectrum-sweep": _run_spectrum_sweep,
    "collapse-sweep": _run_collapse_sweep,
    "steady-sweep": _run_steady_sweep,
    "hysteresis": _run_hysteresis,
    "trajectory": _run_trajectory,
    "wigner": _run_wigner,
    "pfunction": _run_pfunction,
    "oracle-check": _run_oracle_check,
}


def run(scenario: str, config: dict, output_dir: Path, threads: int = 1) -> dict:
    """Execute one scenario; returns the manifest dict."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    extras: dict = {}
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        files = _RUNNERS[scenario](config, outdir, executor, extras)
    finally:
        if executor is not None:
            executor.shutdown()
    manifest = {
        "scenario": scenario,
        "version": f"scully-lamb {__version__}",
        "config": {k: config[k] for k in sorted(config)},
        "outputs": files,
        "threads": threads,
        "wall_clock_seconds": time.time() - start,
        **extras,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="scully-lamb",
        description="Scully-Lamb laser model: Liouvillian spectra, steady states, "
                    "dynamics, trajectories and phase-space artifacts.",
    )
    parser.add_argument("scenario", choices=sorted(SCENARIOS))
    parser.add_argument("--config", required=True, type=Path)
    parser.add_argument("--output-dir", type=Path, default=None)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args.scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None and "seed" in config:
        config["seed"] = args.seed
    outdir = args.output_dir or Path(config.get("output_dir") or f"run-{args.scenario}")
    try:
        manifest = run(args.scenario, config, outdir, threads=max(args.threads, 1))
    except Exception as exc:
        record = {"scenario": args.scenario, "error": str(exc), "type": type(exc).__name__}
        print(json.dumps(record), file=sys.stderr)
        return 1
    print(f"{args.scenario}: wrote {', '.join(manifest['outputs'])} -> {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
