"""Compare the compiled and pure-Python normal-form kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat N] [--sizes 4 8 16]

Kernel timings call both implementations directly on identical inputs.
The end-to-end timing runs ``derivedfunctors verify`` in a subprocess, once
per backend, selected through ``DERIVEDFUNCTORS_PURE``.
"""

import argparse
import os
import random
import subprocess
import sys
import timeit

from derivedfunctors import _kernels_py

try:
    from derivedfunctors import _kernels as _compiled
except ImportError:
    _compiled = None


def random_rows(rng, m, n, bound):
    return [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(m)]


def time_kernel(fn, inputs, repeat):
    return min(timeit.repeat(lambda: [fn(*args) for args in inputs], number=1, repeat=repeat))


def end_to_end(pure: bool, cases: int) -> float:
    env = dict(os.environ, DERIVEDFUNCTORS_PURE="1" if pure else "0")
    code = ("import time; from derivedfunctors.verification import run_all; "
            f"t = time.perf_counter(); run_all(1729, cases={cases}); print(time.perf_counter() - t)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 4, 6, 8, 16])
    ap.add_argument("--count", type=int, default=50, help="matrices per size")
    ap.add_argument("--bound", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cases", type=int, default=20, help="corpus size for the end-to-end run")
    args = ap.parse_args(argv)

    if _compiled is None:
        print("compiled kernels not built; run `python3 setup.py build_ext --inplace` first")
        return 1

    rng = random.Random(0)
    print(f"{'kernel':<8} {'size':>5} {'python ms':>11} {'cython ms':>11} {'speedup':>8}")
    for n in args.sizes:
        mats = [random_rows(rng, n, n, args.bound) for _ in range(args.count)]
        for name, args_for in (("smith", lambda r: (r, n, n)), ("hermite", lambda r: (r, n))):
            inputs = [args_for(r) for r in mats]
            py = time_kernel(getattr(_kernels_py, name), inputs, args.repeat)
            cy = time_kernel(getattr(_compiled, name), inputs, args.repeat)
            print(f"{name:<8} {n:>5} {py * 1e3:>11.2f} {cy * 1e3:>11.2f} {py / cy:>7.1f}x")

    py = end_to_end(True, args.cases)
    cy = end_to_end(False, args.cases)
    print(f"\nverify suites, {args.cases} cases: python {py:.2f}s, cython {cy:.2f}s, speedup {py / cy:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
