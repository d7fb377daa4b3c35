"""Command-line harness.

Three subcommands:

* ``run``      -- one simulation; writes series.csv, snapshots (raw + PGM),
                  and rendered figures into the output directory.
* ``converge`` -- grid-refinement self-convergence study on the quadratic
                  path s = C h^2; prints the rate table and writes
                  cauchy.csv / cauchy.png.
* ``bench``    -- solver-complexity experiment: fixed time step across grid
                  sizes, residual trace of the final step recorded deep into
                  the geometric regime; writes residuals.csv / residuals.png.

Any flag may come from a `key=value` config file via ``--config``; values on
the command line win.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .. import psd
from ..energy import ModelParams
from ..grid import GridSpec
from ..poisson import SpectralPlan
from ..psd import PsdConfig
from ..scheme import Hooks, StepError, run
from .config import ConfigError, RunConfig, load_config_file
from .fileio import read_field_raw, write_series, write_snapshot
from .initial import init_benchmark, init_random
from .study import cauchy_study

__all__ = ["main"]


def _add_physics_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--L", type=float, default=3.2, help="domain side length")
    p.add_argument("--eps", type=float, default=0.18, help="interface width")
    p.add_argument("--eta", type=float, default=1.0, help="model parameter (negative: Willmore variant)")
    p.add_argument("--A", type=float, default=1.0, help="convexification constant (>= 1)")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-9, help="residual sup-norm stopping tolerance")
    p.add_argument("--max-iter", type=int, default=500, help="descent iteration cap per step")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fchsim",
        description="Energy-stable finite-difference solver for the functionalized Cahn-Hilliard equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation")
    p_run.add_argument("--config", type=str, default=None, help="key=value config file")
    p_run.add_argument("--m", type=int, default=128, help="cells per side")
    _add_physics_flags(p_run)
    step = p_run.add_argument_group("time step (choose one)")
    step.add_argument("--dt", type=float, default=None, help="fixed time step")
    step.add_argument("--cfl-c", type=float, default=None, help="quadratic-path constant: dt = C h^2")
    p_run.add_argument("--tmax", type=float, required=True, help="final time")
    p_run.add_argument("--seed", type=int, default=0, help="seed for the random initial state")
    p_run.add_argument("--init", choices=("benchmark", "random", "file"), default="benchmark")
    p_run.add_argument("--init-file", type=str, default=None, help="raw field file for --init file")
    p_run.add_argument("--out", type=str, default="out", help="output directory")
    p_run.add_argument("--snap-every", type=int, default=0, help="snapshot cadence in steps (0: first and last only)")
    p_run.add_argument("--series-every", type=int, default=1, help="series row cadence in steps")
    _add_solver_flags(p_run)

    p_conv = sub.add_parser("converge", help="refinement study on the path dt = C h^2")
    p_conv.add_argument("--config", type=str, default=None, help="key=value config file")
    p_conv.add_argument("--levels", type=str, default="16,32,64,128,256", help="comma-separated grid sizes, each double the last")
    p_conv.add_argument("--cfl-c", type=float, default=0.1, help="quadratic-path constant")
    p_conv.add_argument("--tmax", type=float, default=0.32, help="common final time")
    _add_physics_flags(p_conv)
    _add_solver_flags(p_conv)
    p_conv.add_argument("--out", type=str, default=None, help="optional output directory for cauchy.csv/png")

    p_bench = sub.add_parser("bench", help="solver-complexity residual traces")
    p_bench.add_argument("--config", type=str, default=None, help="key=value config file")
    p_bench.add_argument("--m-list", type=str, default="64,128,256", help="comma-separated grid sizes")
    p_bench.add_argument("--dt", type=float, default=1e-5, help="fixed time step")
    p_bench.add_argument("--steps", type=int, default=20, help="record the trace at this step")
    _add_physics_flags(p_bench)
    p_bench.set_defaults(L=6.4)
    _add_solver_flags(p_bench)
    p_bench.add_argument("--trace-tol", type=float, default=1e-13, help="tolerance of the recorded final solve")
    p_bench.add_argument("--out", type=str, default=None, help="optional output directory for residuals.csv/png")
    return parser


def _apply_config_file(argv: list[str], parser: argparse.ArgumentParser) -> argparse.Namespace:
    args = parser.parse_args(argv)
    cfg_path = getattr(args, "config", None)
    if cfg_path is None:
        return args
    pairs = load_config_file(cfg_path)
    tokens: list[str] = []
    for key, value in pairs.items():
        tokens += [f"--{key.replace('_', '-')}", value]
    # file tokens go first so explicit command-line values win
    merged = [argv[0]] + tokens + [tok for tok in argv[1:]]
    args = parser.parse_args(merged)
    return args


def _initial_field(cfg: RunConfig, grid: GridSpec):
    if cfg.init == "benchmark":
        return init_benchmark(grid)
    if cfg.init == "random":
        return init_random(grid, cfg.seed)
    phi, _ = read_field_raw(cfg.init_file)
    if phi.grid != grid:
        raise ConfigError(
            f"initial field grid {phi.grid} does not match requested m={grid.m}, L={grid.L}"
        )
    return phi


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = RunConfig(
        m=args.m, L=args.L, eps=args.eps, eta=args.eta, A=args.A,
        dt=args.dt, cfl_c=args.cfl_c, tmax=args.tmax, seed=args.seed,
        init=args.init, init_file=args.init_file, out=args.out,
        snap_every=args.snap_every, series_every=args.series_every,
        tol=args.tol, max_iter=args.max_iter,
    )
    grid = GridSpec(cfg.m, cfg.L)
    s = cfg.step_size
    params = ModelParams(eps=cfg.eps, eta=cfg.eta, A=cfg.A, s=s, grid=grid)
    plan = SpectralPlan.create(grid)
    solver = PsdConfig(tol_residual_inf=cfg.tol, max_iters=cfg.max_iter)
    phi0 = _initial_field(cfg, grid)
    n = cfg.n_steps()

    outdir = Path(cfg.out)
    outdir.mkdir(parents=True, exist_ok=True)

    def snapshot(step, t, phi):
        write_snapshot(phi, outdir / f"snap_{step:06d}", t)

    hooks = Hooks(
        snapshot=snapshot,
        snapshot_every=cfg.snap_every if cfg.snap_every > 0 else max(n, 1),
        series_every=cfg.series_every,
    )
    t0 = time.perf_counter()
    summary = run(phi0, n, params, plan, solver, hooks)
    elapsed = time.perf_counter() - t0

    write_series(summary.rows, outdir / "series.csv")
    from .figures import save_field_png, save_series_png

    save_field_png(summary.phi, outdir / "phi_final.png", title=f"t = {n * s:g}")
    save_series_png(summary.rows, outdir / "energy_mass.png")

    first, last = summary.rows[0], summary.rows[-1]
    print(f"steps: {n}  dt: {s:.6g}  final time: {n * s:.6g}  wall: {elapsed:.2f} s")
    print(f"energy: {first.energy:.8g} -> {last.energy:.8g}")
    print(f"mass drift: {last.mass - first.mass:.3e}")
    print(f"outputs in {outdir}")
    return 0


def _cmd_converge(args: argparse.Namespace) -> int:
    levels = [int(tok) for tok in args.levels.split(",") if tok]
    solver = PsdConfig(tol_residual_inf=args.tol, max_iters=args.max_iter)
    rows = cauchy_study(
        levels, args.cfl_c, args.L, args.eps, args.eta, args.A, args.tmax,
        solver_cfg=solver, progress=lambda msg: print("  " + msg, flush=True),
    )
    print(f"{'h_c':>12} {'h_f':>12} {'norm':>12} {'rate':>6} {'iters':>7} {'s/step':>8}")
    for r in rows:
        rate = f"{r.rate:6.2f}" if r.rate is not None else "     -"
        print(
            f"{args.L / r.m_coarse:12.6f} {args.L / r.m_fine:12.6f} "
            f"{r.norm:12.4e} {rate} {r.avg_iters_fine:7.1f} {r.seconds_per_step_fine:8.4f}"
        )
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "cauchy.csv", "w") as fh:
            fh.write("m_coarse,m_fine,norm,rate,avg_iters,sec_per_step\n")
            for r in rows:
                rate = repr(r.rate) if r.rate is not None else ""
                fh.write(
                    f"{r.m_coarse},{r.m_fine},{r.norm!r},{rate},"
                    f"{r.avg_iters_fine!r},{r.seconds_per_step_fine!r}\n"
                )
        from .figures import save_cauchy_png

        save_cauchy_png(rows, outdir / "cauchy.png")
        print(f"outputs in {outdir}")
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    m_list = [int(tok) for tok in args.m_list.split(",") if tok]
    from ..energy import _delta_fe
    from ..grid import CellField

    path_solver = PsdConfig(tol_residual_inf=args.tol, max_iters=args.max_iter)
    trace_solver = PsdConfig(tol_residual_inf=args.trace_tol, max_iters=args.max_iter)
    traces: dict[int, list[float]] = {}
    for m in m_list:
        grid = GridSpec(m, args.L)
        params = ModelParams(eps=args.eps, eta=args.eta, A=args.A, s=args.dt, grid=grid)
        plan = SpectralPlan.create(grid)
        phi = init_benchmark(grid)
        for _ in range(max(args.steps - 1, 0)):
            f = CellField(grid, _delta_fe(phi.values, grid.h, args.eps, args.eta, args.A))
            phi, _ = psd.solve(phi, f, phi, params, plan, path_solver)
        f = CellField(grid, _delta_fe(phi.values, grid.h, args.eps, args.eta, args.A))
        _, report = psd.solve(phi, f, phi, params, plan, trace_solver)
        traces[m] = list(report.residual_history)
        print(f"m={m:4d}: {report.iters} iterations at step {args.steps}, "
              f"first residual {report.residual_history[0]:.3e}, last {report.residual_history[-1]:.3e}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "residuals.csv", "w") as fh:
            fh.write("m,iteration,residual\n")
            for m, hist in traces.items():
                for i, v in enumerate(hist):
                    fh.write(f"{m},{i},{v!r}\n")
        from .figures import save_residual_png

        save_residual_png(traces, outdir / "residuals.png")
        print(f"outputs in {outdir}")
    return 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        args = _apply_config_file(argv, parser)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "converge":
            return _cmd_converge(args)
        return _cmd_bench(args)
    except (ValueError, StepError, psd.NonConvergenceError, psd.LineSearchError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
