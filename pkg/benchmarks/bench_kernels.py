#!/usr/bin/env python
"""Benchmark the compiled pairwise kernels against the numpy fallback.

Run after `pip install -e .`:

    python benchmarks/bench_kernels.py [--sizes 256,1024,2048] [--repeat 5]
"""

import argparse
import time

import numpy as np

from coulombgas import _pairwise_np
from coulombgas import kernels

try:
    from coulombgas import _pairwise as _ext
except ImportError:
    _ext = None


def best_of(fn, repeat):
    durations = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        durations.append(time.perf_counter() - t0)
    return min(durations)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="256,1024,2048")
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"active backend: {kernels.BACKEND}")
    if _ext is None:
        print("compiled extension not available; timing the numpy fallback only")
    header = f"{'N':>6} {'kernel':>20} {'numpy [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    rng = np.random.default_rng(0)
    for n in sizes:
        z = rng.normal(size=n) + 1j * rng.normal(size=n)
        z = np.ascontiguousarray(z)
        for name in ("interaction_energy", "interaction_grad",
                     "mirror_energy", "mirror_grad"):
            t_np = best_of(lambda: getattr(_pairwise_np, name)(z), args.repeat)
            if _ext is not None:
                t_ext = best_of(lambda: getattr(_ext, name)(z), args.repeat)
                ratio = t_np / t_ext if t_ext > 0 else float("inf")
                print(f"{n:>6} {name:>20} {1e3 * t_np:>12.3f} {1e3 * t_ext:>14.3f} {ratio:>8.1f}")
            else:
                print(f"{n:>6} {name:>20} {1e3 * t_np:>12.3f} {'-':>14} {'-':>8}")


if __name__ == "__main__":
    main()
