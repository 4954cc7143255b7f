"""Compiled kernels vs the numpy fallback.

    python3 benchmarks/bench_kernels.py [--points 20000] [--n 24] [--repeat 3]

Times the per-point BGK flux, the 1D WENO line reconstruction and one
spatial-operator evaluation (a full stage) on a TGV field, with each
backend, and checks that both backends agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gks4 import backend
from gks4.cases import CaseConfig, build_case
from gks4.grid import fill_ghosts
from gks4.integrator import Scheme, compute_dt, spatial_operator
from gks4.kinetics import GasModel
from gks4.reconstruction import GAUSS_X, ReconConfig, line_points


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_interface(n, rng):
    def state():
        rho = rng.uniform(0.5, 2.0, n)
        u = rng.uniform(-1.0, 1.0, (3, n))
        p = rng.uniform(0.5, 2.0, n)
        return np.stack([rho, *(rho * u), p / 0.4 + 0.5 * rho * (u ** 2).sum(0)])
    slopes = [0.1 * rng.standard_normal((3, 5, n)) for _ in range(3)]
    return state(), slopes[0], state(), slopes[1], slopes[2]


def bench_flux(n, repeat, rng):
    gas = GasModel(gamma=1.4)
    wl, dl, wr, dr, d0 = random_interface(n, rng)
    res = {}
    for name in ("compiled", "python"):
        res[name] = best_of(lambda: backend.flux_batch(wl, dl, wr, dr, d0, 1e-3, gas, name), repeat)
    diff = max(np.abs(a - b).max() for a, b in zip(res["compiled"][1], res["python"][1]))
    return {k: v[0] / n * 1e6 for k, v in res.items()}, diff


def bench_lines(n, repeat, rng):
    v = rng.standard_normal((5, n + 5, 400))
    res = {}
    for name in ("compiled", "python"):
        res[name] = best_of(lambda: line_points(v, 0, n, (-GAUSS_X, GAUSS_X), True, 1e-6, True, name), repeat)
    diff = max(np.abs(a - b).max() for a, b in zip(res["compiled"][1], res["python"][1]))
    return {k: v[0] for k, v in res.items()}, diff


def bench_stage(n, repeat):
    setup = build_case(CaseConfig(case="tgv", n=(n, n, n)))
    fld = setup.field
    scheme = Scheme(setup.gas, setup.bc, ReconConfig("weno5_js", "component"))
    fill_ghosts(fld, scheme.bc, scheme.gas)
    dt = compute_dt(fld, scheme.cfl, scheme.gas)
    res = {}
    saved = backend.NAME
    try:
        for name in ("compiled", "python"):
            backend.NAME = name
            scheme.backend = name
            res[name] = best_of(lambda: spatial_operator(fld, dt, scheme), repeat)
    finally:
        backend.NAME = saved
    diff = np.abs(res["compiled"][1].L - res["python"][1].L).max()
    return {k: v[0] for k, v in res.items()}, diff


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--n", type=int, default=24, help="cells per axis for the full stage")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)
    if backend._kernels is None:
        raise SystemExit("compiled kernels are not built; nothing to compare")
    backend.set_threads(args.threads)
    rng = np.random.default_rng(0)

    t, d = bench_flux(args.points, args.repeat, rng)
    print(f"flux      compiled {t['compiled']:8.2f} us/pt   python {t['python']:8.2f} us/pt   "
          f"speedup {t['python'] / t['compiled']:6.1f}x   max diff {d:.1e}")
    t, d = bench_lines(args.points // 400 * 10, args.repeat, rng)
    print(f"weno line compiled {t['compiled'] * 1e3:8.2f} ms      python {t['python'] * 1e3:8.2f} ms      "
          f"speedup {t['python'] / t['compiled']:6.1f}x   max diff {d:.1e}")
    t, d = bench_stage(args.n, args.repeat)
    print(f"stage {args.n}^3 compiled {t['compiled']:6.2f} s      python {t['python']:6.2f} s      "
          f"speedup {t['python'] / t['compiled']:6.1f}x   max diff {d:.1e}")


if __name__ == "__main__":
    main()
