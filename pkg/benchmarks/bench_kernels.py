"""Compare the numba and pure-numpy row-reduction backends.

Usage: python benchmarks/bench_kernels.py [--sizes 40 80 160] [--repeat 3] [--p 7]

Prints one line per (size, backend) with the best wall time, then an
end-to-end timing of the triangle suite over F_p on a small window.  Both
backends must produce identical echelon forms; the script exits nonzero
otherwise.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from kbcat import _kernels
from kbcat.complexes import clear_caches
from kbcat.examples import DualNumbers, verify_triangles
from kbcat.exactlin import GF, Mat, rref


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_rref(sizes, repeat: int, p: int) -> bool:
    field = GF(p)
    rng = np.random.default_rng(0)
    same = True
    print(f"rref over F{p}")
    for n in sizes:
        a = Mat(field, rng.integers(0, p, size=(n, n + n // 2)))
        results = {}
        for backend in ("numba", "numpy"):
            if backend == "numba" and not _kernels.HAVE_NUMBA:
                continue
            prev = _kernels.set_backend(backend)
            try:
                rref(field, a.a)  # warm up the jit
                t = best_of(lambda: rref(field, a.a), repeat)
                results[backend] = rref(field, a.a)
            finally:
                _kernels.set_backend(prev)
            print(f"  n={n:4d} {backend:6s} {t * 1e3:10.2f} ms")
        if len(results) == 2:
            (r1, p1), (r2, p2) = results["numba"], results["numpy"]
            same &= p1 == p2 and np.array_equal(r1, r2)
    return same


def bench_suite(p: int, window: int) -> None:
    print(f"triangle suite, dual numbers over F{p}, W={window}")
    for backend in ("numba", "numpy"):
        if backend == "numba" and not _kernels.HAVE_NUMBA:
            continue
        prev = _kernels.set_backend(backend)
        try:
            clear_caches()
            t0 = time.perf_counter()
            rep = verify_triangles(DualNumbers(GF(p)), window)
            dt = time.perf_counter() - t0
        finally:
            _kernels.set_backend(prev)
        print(f"  {backend:6s} {dt:8.2f} s  ({rep.summary['pass']} checks passed)")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[40, 80, 160])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--p", type=int, default=7)
    ap.add_argument("--window", type=int, default=2)
    args = ap.parse_args(argv)
    same = bench_rref(args.sizes, args.repeat, args.p)
    bench_suite(args.p, args.window)
    if not same:
        print("backends disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
