#!/usr/bin/env python3
"""Benchmark the compiled extension against the pure-numpy fallback.

Times the three numerical hot paths in isolation plus one full coverage
replication, under each available backend.

    python benchmarks/bench_backends.py [--n 100] [--grid 101] [--loops 200]
"""

import argparse
import time
from contextlib import contextmanager

import numpy as np

from dyadkde import SimulationConfig, _backend, generate_sample, get_kernel
from dyadkde.estimator import rot_bandwidth
from dyadkde.inference import jel_value, mjel_value, prepare_context
from dyadkde.montecarlo import true_density

HOT_FUNCTIONS = ("kernel_sums_core", "density_grid", "el_solve")


@contextmanager
def use_backend(name):
    impl = _backend.load_backend(name)
    saved = {fn: getattr(_backend, fn) for fn in HOT_FUNCTIONS}
    try:
        for fn in HOT_FUNCTIONS:
            setattr(_backend, fn, getattr(impl, fn))
        yield impl
    finally:
        for fn, original in saved.items():
            setattr(_backend, fn, original)


def timeit(fn, loops):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(loops):
        fn()
    return (time.perf_counter() - start) / loops


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=100, help="vertices per sample")
    parser.add_argument("--grid", type=int, default=101, help="grid points")
    parser.add_argument("--loops", type=int, default=200)
    args = parser.parse_args()

    kernel = get_kernel()
    config = SimulationConfig(beta=1, n=args.n, base_seed=12)
    sample = generate_sample(config, 0)
    h = rot_bandwidth(sample)
    ei = np.ascontiguousarray(sample.edge_i - 1, dtype=np.int32)
    ej = np.ascontiguousarray(sample.edge_j - 1, dtype=np.int32)
    values = sample.edge_values
    xs = np.linspace(-2, 2, args.grid)
    rng = np.random.default_rng(34)
    v_el = rng.normal(size=args.n)
    theta0 = true_density(1, config.x)

    def one_replication(rep):
        s = generate_sample(config, rep)
        ctx = prepare_context(s, kernel, config.x, rot_bandwidth(s))
        jel_value(ctx, theta0)
        if ctx.gamma_m_sq > 0:
            mjel_value(ctx, theta0)

    rows = {}
    for name in _backend.available_backends():
        with use_backend(name) as impl:
            rows[name] = {
                "kernel_sums": timeit(
                    lambda: impl.kernel_sums_core(
                        ei, ej, values, args.n, config.x, h, kernel.kernel_id, 1.0
                    ),
                    args.loops,
                ),
                "density_grid": timeit(
                    lambda: impl.density_grid(values, xs, h, kernel.kernel_id, 1.0),
                    max(args.loops // 4, 1),
                ),
                "el_solve": timeit(lambda: impl.el_solve(v_el), args.loops),
                "replication": timeit(
                    lambda: one_replication(int(rng.integers(1, 10_000))),
                    max(args.loops // 4, 1),
                ),
            }

    print(f"n={args.n} edges={values.size} grid={args.grid} "
          f"(default backend: {_backend.BACKEND})")
    header = f"{'stage':<14}" + "".join(f"{name:>14}" for name in rows)
    if len(rows) > 1:
        header += f"{'speedup':>10}"
    print(header)
    for stage in ("kernel_sums", "density_grid", "el_solve", "replication"):
        line = f"{stage:<14}"
        times = [rows[name][stage] for name in rows]
        for t in times:
            line += f"{t * 1e6:>12.1f}us"
        if len(times) > 1:
            line += f"{times[-1] / times[0]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
