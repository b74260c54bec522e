"""Time the numba kernels against the pure-numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--sizes 1000 10000 100000] [--repeat 5]

Both backends are imported directly, so the ``HEAVYMA_NO_NUMBA`` flag is not
needed here.  Numba compilation is triggered once before timing.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from heavyma import kernels
from heavyma.cadlag import StepFunction


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def walk(rng, n: int) -> StepFunction:
    # heavy-tailed random walk on the 1/n grid, like V_n
    x = rng.standard_cauchy(n) / n
    return StepFunction(0.0, np.arange(1, n + 1) / n, np.cumsum(x))


def cases(n: int, rng):
    x = rng.standard_normal(n)
    c = rng.standard_normal(8)
    z = rng.standard_normal(n + 7)
    f, g = walk(rng, n), walk(rng, n)
    fa = (f.times, f.levels, g.times, g.levels)
    y = np.ascontiguousarray(f.levels)
    starts = np.concatenate(([0.0], f.times))
    r = float(np.max(np.abs(f.levels - g.levels))) / 4
    return {
        "ar1_filter": lambda b: b.ar1_filter(0.5, x),
        "ma_filter(q=7)": lambda b: b.ma_filter(c, z, 7, n),
        "covers": lambda b: b.covers(*fa, r),
        "hausdorff_bisect": lambda b: b.hausdorff_bisect(*fa, 4 * r, 1e-6),
        "oscillation_candidates": lambda b: b.oscillation_candidates(y, starts),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    nb, npb = kernels.numba_backend, kernels.numpy_backend
    if nb is None:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    for fn in cases(50, rng).values():
        fn(nb)
    print(f"{'kernel':<24}{'n':>8}{'numba [ms]':>13}{'numpy [ms]':>13}{'speedup':>9}")
    for n in args.sizes:
        for name, fn in cases(n, rng).items():
            t_nb = best_of(lambda: fn(nb), args.repeat)
            t_np = best_of(lambda: fn(npb), args.repeat)
            print(f"{name:<24}{n:>8}{1e3 * t_nb:>13.3f}{1e3 * t_np:>13.3f}{t_np / t_nb:>9.1f}")


if __name__ == "__main__":
    main()
