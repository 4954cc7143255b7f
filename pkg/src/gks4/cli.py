"""Command-line entry point: ``gks4 run | reference-sod | check-config``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import backend
from .cases import build_case, reference_sod_spherical
from .config import ConfigError, RunConfig, parse_config
from .diagnostics import dissipation_rate, record
from .grid import fill_ghosts
from .integrator import Scheme, compute_dt, step
from .io import read_checkpoint, write_checkpoint, write_csv, write_field
from .kinetics import InvalidStateError

log = logging.getLogger("gks4")

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def prepare(cfg: RunConfig):
    """Initial field and scheme for a parsed configuration."""
    setup = build_case(cfg.case)
    gas = replace(setup.gas, tau_eps=cfg.tau_eps, tau_c=cfg.tau_c)
    scheme = Scheme(gas, setup.bc, cfg.recon, cfg.cfl, setup.gravity)
    return setup.field, scheme, setup.meta


def run(cfg: RunConfig, restart: str | None = None, out=None) -> int:
    out = out or sys.stdout
    backend.set_threads(cfg.threads)
    try:
        fld, scheme, meta = prepare(cfg)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    nstep = 0
    if restart:
        fld, nstep, _ = read_checkpoint(restart)
    outdir = Path(cfg.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rho0 = 1.0
    rows = []
    next_out = fld.time + cfg.output_interval if cfg.output_interval else None

    def diagnose():
        rows.append(record(fld, scheme.gas, rho0, averaged_skewness=cfg.skewness_averaged).as_row())

    diagnose()
    t_start = time.perf_counter()
    steps_here = 0
    try:
        while fld.time < cfg.t_end * (1 - 1e-14):
            if cfg.max_steps is not None and steps_here >= cfg.max_steps:
                break
            fill_ghosts(fld, scheme.bc, scheme.gas, scheme.gravity)
            dt = min(compute_dt(fld, scheme.cfl, scheme.gas), cfg.t_end - fld.time)
            _, stats = step(fld, scheme, dt)
            nstep += 1
            steps_here += 1
            log.debug("step %d t=%.6g dt=%.3g fallbacks=%d", nstep, fld.time, stats.dt, stats.fallbacks)
            if nstep % cfg.diagnostics_every == 0:
                diagnose()
            due = cfg.output_every and nstep % cfg.output_every == 0
            if next_out is not None and fld.time >= next_out:
                due = True
                next_out += cfg.output_interval
            if due and cfg.field_format != "none":
                ext = "vtk" if cfg.field_format == "vtk" else "bin"
                write_field(fld, outdir / f"field_{nstep:06d}.{ext}", cfg.field_format, scheme.gas)
            if cfg.checkpoint_every and nstep % cfg.checkpoint_every == 0:
                write_checkpoint(fld, outdir / f"checkpoint_{nstep:06d}.ckpt", nstep, cfg.case.seed)
    except InvalidStateError as exc:
        print(f"solver error at step {nstep + 1}, t={fld.time:.6g}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    wall = time.perf_counter() - t_start
    if rows[-1]["time"] != fld.time:
        diagnose()
    if len(rows) >= 3:
        eps = dissipation_rate([r["time"] for r in rows], [r["kinetic_energy"] for r in rows])
        for r, e in zip(rows, eps):
            r["dissipation"] = float(e)
    write_csv(rows, outdir / "diagnostics.csv")
    write_checkpoint(fld, outdir / "final.ckpt", nstep, cfg.case.seed)
    if cfg.field_format != "none":
        ext = "vtk" if cfg.field_format == "vtk" else "bin"
        write_field(fld, outdir / f"final.{ext}", cfg.field_format, scheme.gas)
    cells = int(np.prod(fld.grid.shape))
    rate = cells * steps_here / wall if wall > 0 else float("nan")
    print(f"case={cfg.case.case} steps={nstep} t={fld.time:.6g} wall={wall:.2f}s "
          f"cell_steps_per_s={rate:.4g} backend={backend.NAME}", file=out)
    return 0


def _overrides(args):
    ov = {}
    if getattr(args, "threads", None) is not None:
        ov["threads"] = args.threads
    if getattr(args, "output_dir", None) is not None:
        ov["output_dir"] = args.output_dir
    if getattr(args, "until", None) is not None:
        ov["t_end"] = args.until
    if getattr(args, "seed", None) is not None:
        ov["seed"] = args.seed
    return ov


def _load(args):
    text = Path(args.config).read_text(encoding="utf-8")
    return parse_config(text, _overrides(args))


def build_parser():
    ap = argparse.ArgumentParser(prog="gks4", description="Fourth-order gas-kinetic solver on Cartesian grids")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--threads", type=int)
        p.add_argument("--output-dir")
        p.add_argument("--until", type=float, help="end time (overrides t_end)")
        p.add_argument("--seed", type=int)

    r = sub.add_parser("run", help="run a case")
    common(r)
    r.add_argument("--restart", help="checkpoint to continue from")

    c = sub.add_parser("check-config", help="validate a configuration and print the resolved settings")
    common(c)

    s = sub.add_parser("reference-sod", help="radial Sod reference solution")
    s.add_argument("--cells", type=int, default=10000)
    s.add_argument("--until", type=float, default=0.2)
    s.add_argument("--dims", type=int, default=3, choices=(1, 2, 3))
    s.add_argument("--threads", type=int)
    s.add_argument("--output", default="sod_reference.csv")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "threads", None):
        backend.set_threads(args.threads)
    if args.command == "reference-sod":
        prof = reference_sod_spherical(args.cells, args.until, args.dims)
        rows = [{"r": float(a), "rho": float(b), "u": float(c), "p": float(d)}
                for a, b, c, d in zip(prof.r, prof.rho, prof.u, prof.p)]
        write_csv(rows, args.output)
        print(f"wrote {len(rows)} cells at t={prof.time:.6g} to {args.output}")
        return 0
    try:
        cfg = _load(args)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "check-config":
        print(f"case: {cfg.case}")
        print(f"recon: {cfg.recon}")
        print(f"cfl={cfg.cfl} t_end={cfg.t_end} threads={cfg.threads} output_dir={cfg.output_dir}")
        return 0
    return run(cfg, restart=args.restart)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
