"""Compare the compiled interpolation gathers against the numpy fallback.

Run as: python3 benchmarks/bench_kernels.py [n]

Only the semi-Lagrangian gathers are compiled; the FFT-bound parts of the
solver gain nothing from a JIT and stay numpy either way.
"""

import sys
import time

import numpy as np

from insdecay import _kernels


def bench(fn, *args, repeats: int = 7) -> float:
    fn(*args)  # warm-up (JIT compile on the first call)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 512
    rng = np.random.Generator(np.random.Philox(0))
    field = rng.standard_normal((n, n))
    x = rng.uniform(0.0, n, size=(n, n))
    y = rng.uniform(0.0, n, size=(n, n))

    rows = [("bilinear", _kernels._bilinear_numpy,
             getattr(_kernels, "_bilinear_numba", None)),
            ("monotone_cubic", _kernels._monotone_cubic_numpy,
             getattr(_kernels, "_monotone_cubic_numba", None))]

    print(f"gather benchmark, n = {n} ({n*n} targets), "
          f"numba {'on' if _kernels.NUMBA_ENABLED else 'off'}")
    print(f"{'kernel':<16} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9}")
    for name, ref, fast in rows:
        t_ref = bench(ref, field, x, y) * 1e3
        if fast is None:
            print(f"{name:<16} {t_ref:>12.2f} {'n/a':>12} {'n/a':>9}")
            continue
        t_fast = bench(fast, field, x, y) * 1e3
        err = np.max(np.abs(ref(field, x, y) - fast(field, x, y)))
        print(f"{name:<16} {t_ref:>12.2f} {t_fast:>12.2f} {t_ref / t_fast:>8.1f}x"
              f"   (max |diff| = {err:.2e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
