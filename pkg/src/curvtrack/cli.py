"""``curvtrack <command> --config FILE [--out DIR] [--threads N] [--seed N]``.

Exit status: 0 on success, 1 on a physics error (or failed ``validate``),
2 on a configuration error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import experiments
from .config import COMMANDS, RunConfig, parse_config
from .errors import ConfigError, DegeneratePoint, PhysicsError
from .evolution import default_dt, integrate_batch, prepare_initial, step_count
from .output import atomic_write, csv_text, emit_heatmap
from .response import profile_from_trajectory
from .spectral import berry_curvature_closed_form

CHERN_COLUMNS = ("delta2_over_delta1", "chern_dyn", "chern_conv", "euler", "flag")
MAP_COLUMNS = ("delta2_over_delta1", "theta_over_pi", "value", "flag")
CURVATURE_COLUMNS = ("theta_over_pi", "b_dyn", "b_conventional", "sigma_y", "flag")
EVOLVE_COLUMNS = ("t_us", "theta_over_pi", "rho_ee", "rho_gg", "re_rho_eg", "im_rho_eg", "sigma_y")
SINGULARITY_COLUMNS = ("delta2_over_delta1", "theta_over_pi")


def _trajectory(config: RunConfig, multiple_of=1):
    spec, protocol, noise = config.spec(), config.protocol_obj(), config.noise_obj()
    dt = config.numerics.dt_us or default_dt([spec], protocol)
    n_steps = step_count(dt, protocol.tau, multiple_of)
    run = integrate_batch([spec], protocol, [prepare_initial(spec, protocol)], noise=noise, n_steps=n_steps)
    return run.row(0, protocol, spec, noise)


def curvature_table(config: RunConfig):
    n_theta = config.numerics.n_theta
    traj = _trajectory(config, multiple_of=n_theta - 1)
    profile = profile_from_trajectory(traj)
    stride = (len(traj) - 1) // (n_theta - 1)
    rows = []
    for k in range(0, len(traj), stride):
        theta = float(profile.theta[k])
        try:
            conv, flag = float(berry_curvature_closed_form(traj.spec, theta)), "ok"
        except DegeneratePoint:
            conv, flag = math.nan, "degenerate"
        rows.append((theta / math.pi, profile.b_dyn[k], conv, profile.sigma_y[k], flag))
    return CURVATURE_COLUMNS, rows


def evolve_table(config: RunConfig):
    traj = _trajectory(config)
    sy = traj.sigma_y
    rows = [
        (traj.t[k], traj.theta[k] / math.pi, traj.rho_ee[k], traj.rho_gg[k], traj.rho_eg[k].real, traj.rho_eg[k].imag, sy[k])
        for k in range(len(traj))
    ]
    return EVOLVE_COLUMNS, rows


def chern_rows(config: RunConfig, threads=1):
    spec, protocol, noise = config.spec(), config.protocol_obj(), config.noise_obj()
    kwargs = dict(noise=noise, threads=threads, dt=config.numerics.dt_us, n_quad=config.numerics.n_quad)
    if config.sweep is not None:
        return experiments.chern_vs_offset(spec, config.sweep_range(), protocol, **kwargs)
    return experiments.chern_table(spec, [config.manifold.delta2_over_delta1], protocol, **kwargs)


def compute_map(config: RunConfig, threads=1) -> experiments.MapResult:
    spec, rng, n_theta = config.spec(), config.sweep_range(), config.numerics.n_theta
    quantity = config.map.quantity
    if quantity.startswith("overlap"):
        band = "ground" if quantity == "overlap_ground" else "excited"
        return experiments.overlap_map(spec, rng, n_theta, band)
    protocol, noise, dt = config.protocol_obj(), config.noise_obj(), config.numerics.dt_us
    if quantity == "curvature":
        return experiments.curvature_map(spec, rng, protocol, n_theta, noise, threads, dt)
    return experiments.fidelity_map(spec, rng, protocol, noise, n_theta, threads, dt)


def map_table(result: experiments.MapResult):
    grid = result.grid
    extra = "bare_g" in result.aux
    columns = MAP_COLUMNS + (("bare_g",) if extra else ())
    rows = []
    for i, x in enumerate(grid.delta2_over_delta1):
        for j, y in enumerate(grid.theta_over_pi):
            row = (x, y, result.values[i, j], "degenerate" if result.flags[i, j] else "ok")
            if extra:
                row += (result.aux["bare_g"][i, j],)
            rows.append(row)
    return columns, rows


def singularity_table(config: RunConfig):
    result = experiments.overlap_map(config.spec(), config.sweep_range(), config.numerics.n_theta, "ground")
    points = experiments.locate_singularities(result, config.map.threshold)
    return SINGULARITY_COLUMNS, points


def produce(config: RunConfig, threads=1):
    """Text of the command's output file (CSV, or SVG for maps)."""
    cmd = config.command
    if cmd == "curvature":
        return csv_text(*curvature_table(config))
    if cmd == "evolve":
        return csv_text(*evolve_table(config))
    if cmd == "chern":
        return csv_text(CHERN_COLUMNS, chern_rows(config, threads))
    if cmd == "singularities":
        return csv_text(*singularity_table(config))
    if cmd == "map":
        result = compute_map(config, threads)
        if config.output.format == "svg":
            return result
        return csv_text(*map_table(result))
    raise ValueError(f"command {cmd!r} produces no file")


def run(config: RunConfig, out_dir=".", threads=1, log=None) -> int:
    log = log or sys.stderr
    if config.command == "validate":
        from .acceptance import print_table, run_acceptance

        results = run_acceptance(threads=threads)
        print_table(results)
        return 0 if all(r.passed for r in results) else 1
    path = os.path.join(out_dir, config.output_name)
    try:
        produced = produce(config, threads)
    except PhysicsError as exc:
        print(f"physics error: {type(exc).__name__}: {exc}", file=log)
        return 1
    if isinstance(produced, experiments.MapResult):
        emit_heatmap(produced, path, title=f"{config.map.quantity} ({config.manifold.kind})")
    else:
        atomic_write(path, produced)
    print(path, file=log)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="curvtrack", description="Dynamical Berry curvature experiments.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="run configuration file (not needed for validate)")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--seed", type=int, default=0, help="reserved; every computation is deterministic")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("config error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        if args.config is None:
            if args.command != "validate":
                raise ConfigError("--config is required")
            config = RunConfig(command="validate")
        else:
            with open(args.config, encoding="utf-8") as fh:
                config = parse_config(fh.read())
            if config.command != args.command:
                raise ConfigError(f"config is for {config.command!r}, not {args.command!r}")
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run(config, args.out, args.threads)


if __name__ == "__main__":
    sys.exit(main())
