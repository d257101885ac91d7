"""Compare the compiled and pure-numpy spline evaluation kernels.

The package selects the backend at import time from the EULERLAB_NO_NUMBA
environment variable; here we call both implementations directly so a
single process can time them side by side.

Usage: python3 benchmarks/bench_interp.py [--n 256] [--points 200000]
"""

import argparse
import time

import numpy as np

from eulerlab import _kernels


def bench(fn, args, repeats=5):
    fn(*args)  # warm-up (compilation, cache)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256, help="grid points per axis")
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    print(f"selected backend: {_kernels.BACKEND}")
    print(f"{'case':<28}{'numpy':>12}{'numba':>12}{'speedup':>10}")

    has_numba = _kernels.BACKEND == "numba"
    for dim in (2, 3):
        n = args.n if dim == 2 else max(args.n // 4, 16)
        coeffs = rng.standard_normal((dim,) + (n,) * dim)
        ts = [rng.uniform(0, n, size=args.points) for _ in range(dim)]
        for order in (3, 5):
            label = f"{dim}d n={n} order={order}"
            if dim == 2:
                np_t = bench(_kernels._eval_2d_numpy,
                             (coeffs, *ts, order), args.repeats)
                nb_t = bench(_kernels.eval_spline_2d,
                             (coeffs, *ts, order), args.repeats) \
                    if has_numba else np.nan
            else:
                np_t = bench(_kernels._eval_3d_numpy,
                             (coeffs, *ts, order), args.repeats)
                nb_t = bench(_kernels.eval_spline_3d,
                             (coeffs, *ts, order), args.repeats) \
                    if has_numba else np.nan
            speed = np_t / nb_t if has_numba else np.nan
            print(f"{label:<28}{np_t * 1e3:>10.2f}ms{nb_t * 1e3:>10.2f}ms"
                  f"{speed:>9.1f}x")

    if not has_numba:
        print("(numba backend disabled; set EULERLAB_NO_NUMBA=0 or unset it)")


if __name__ == "__main__":
    main()
