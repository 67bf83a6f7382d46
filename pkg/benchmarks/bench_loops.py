"""Compiled vs pure-Python loop-counting kernel, alone and inside the exact purity.

    python benchmarks/bench_loops.py [--repeat N]
"""
import argparse
import timeit

import numpy as np

from pnormlab import _kernels
from pnormlab.linalg import RegisterDims
from pnormlab.weingarten import _IN_U, _IN_UBAR, _NODE_KIND, _OUT_U, _OUT_UBAR, all_permutations, average_purity_exact


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args()

    perms = np.array([p.images for p in all_permutations(4)], dtype=np.int64)
    kernel_args = (perms, _OUT_U, _OUT_UBAR, _IN_U, _IN_UBAR, _NODE_KIND, 3)
    dims = RegisterDims(3, 8, 24)
    print(f"backends available: {_kernels.available_backends()} (default {_kernels.BACKEND})")
    timings = {}
    for name in _kernels.available_backends():
        fn = _kernels.get_loop_counts(name)
        k = min(timeit.repeat(lambda: fn(*kernel_args), number=1, repeat=args.repeat))
        full = min(timeit.repeat(lambda: average_purity_exact(dims, name), number=1, repeat=args.repeat))
        timings[name] = (k, full)
        print(f"{name:>7}: kernel {k * 1e3:8.3f} ms   exact purity ({dims}) {full * 1e3:8.3f} ms")
    if len(timings) == 2:
        print(f"speedup: kernel x{timings['python'][0] / timings['cython'][0]:.1f}, "
              f"end to end x{timings['python'][1] / timings['cython'][1]:.2f}")


if __name__ == "__main__":
    main()
