#!/usr/bin/env python3
"""Compare the compiled kernel backend against the pure-NumPy fallback.

Times the raw per-mode kernels and the end-to-end integrator step on a
production-sized anisotropic lattice.  Run after building the extension:

    python benchmarks/bench_kernels.py [--dims 512,1,16] [--repeat 5]
"""

import argparse
import time

import numpy as np

import fnslab.kernel as kmod
from fnslab.construction import InflationConfig, build_u0
from fnslab.kernel import get_backend
from fnslab.lattice import Lattice
from fnslab.solver import TimeGrid, mild_solve
from fnslab.spectral import FractionalParams


def time_call(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_raw_kernels(backend, n, repeat):
    rng = np.random.default_rng(0)
    c = np.ascontiguousarray(rng.standard_normal((3, n))
                             + 1j * rng.standard_normal((3, n)))
    ks = [np.ascontiguousarray(rng.standard_normal((3, n))
                               + 1j * rng.standard_normal((3, n)))
          for _ in range(4)]
    mult = rng.uniform(0.5, 1.0, n)
    m = [rng.integers(-8, 8, n).astype(float) for _ in range(3)]
    ksq = m[0] ** 2 + m[1] ** 2 + m[2] ** 2
    inv = np.where(ksq > 0, 1.0 / np.where(ksq > 0, ksq, 1.0), 0.0)
    u = rng.standard_normal((3, n))
    dv = rng.standard_normal((9, n))
    out_r = np.empty_like(u)
    out_c = np.empty_like(c)
    grad_out = np.empty((9, n), dtype=complex)
    probes = {
        "apply_multiplier": lambda: backend.apply_multiplier(c, mult),
        "leray": lambda: backend.leray(c, m[0], m[1], m[2], inv),
        "advect": lambda: backend.advect(u, dv, out_r),
        "spectral_gradient": lambda: backend.spectral_gradient(
            c, m[0], m[1], m[2], grad_out),
        "if_stage": lambda: backend.if_stage(out_c, c, ks[0], mult, mult, 0.1),
        "if_final": lambda: backend.if_final(c, *ks, mult, mult, 1e-3),
    }
    return {name: time_call(fn, repeat) for name, fn in probes.items()}


def bench_integrator(backend_name, dims, repeat):
    backend = get_backend(backend_name)
    saved = {fn: getattr(kmod, fn) for fn in
             ("apply_multiplier", "leray", "advect", "if_stage", "if_final")}
    for fn in saved:
        setattr(kmod, fn, getattr(backend, fn))
    try:
        cfg = InflationConfig(r=3, alpha=1.0, beta=0.45, K_override=4)
        lat = Lattice(dims)
        u0 = build_u0(cfg, lat)
        params = FractionalParams()
        grid = TimeGrid(np.array([0.0, 0.02]), dt=1e-4)

        def run():
            mild_solve(u0, params, grid)

        run()  # warm caches
        best = time_call(run, repeat)
        steps = 200
        return best / steps
    finally:
        for fn, impl in saved.items():
            setattr(kmod, fn, impl)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dims", default="512,1,16")
    ap.add_argument("--n", type=int, default=512 * 16,
                    help="modes for the raw kernel probes")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    dims = tuple(int(x) for x in args.dims.split(","))

    backends = ["python"]
    try:
        get_backend("compiled")
        backends.append("compiled")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    raw = {name: bench_raw_kernels(get_backend(name), args.n, args.repeat)
           for name in backends}
    print(f"\nraw kernels on {args.n} modes (best of {args.repeat}, us):")
    header = f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for kernel_name in raw[backends[0]]:
        row = f"{kernel_name:<18}"
        for b in backends:
            row += f"{raw[b][kernel_name] * 1e6:>12.1f}"
        if len(backends) == 2:
            ratio = raw["python"][kernel_name] / raw["compiled"][kernel_name]
            row += f"{ratio:>9.2f}x"
        print(row)

    print(f"\nintegrator step on lattice {dims} (200 fixed steps):")
    times = {}
    for b in backends:
        times[b] = bench_integrator(b, dims, args.repeat)
        print(f"  {b:<10} {times[b] * 1e3:8.3f} ms/step")
    if len(backends) == 2:
        print(f"  speedup    {times['python'] / times['compiled']:8.2f}x")


if __name__ == "__main__":
    main()
