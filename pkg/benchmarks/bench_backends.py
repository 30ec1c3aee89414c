#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the exhaustive-enumeration kernels (the hot path of the whole
package) on growing lattices for both backends and prints a table with the
speedup.  The first numba call includes JIT compilation; a warmup run is
timed separately so the steady-state numbers are comparable.

Usage: python benchmarks/bench_backends.py [--max-spins 24] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

from bkising import Couplings, FieldMode, LatticeSpec, brute_force_partition, brute_force_symbolic
from bkising._kernels import available_backends


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--max-spins", type=int, default=24)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    sizes = [(2, 8), (5, 4), (4, 6), (2, 12)]
    sizes = [(m, n) for m, n in sizes if m * n <= args.max_spins]
    c = Couplings(0.35, 0.55)
    backends = available_backends()

    if "numba" in backends:
        t0 = time.perf_counter()
        brute_force_partition(LatticeSpec(2, 2), c, FieldMode.IPI_OVER_TWO, backend="numba")
        brute_force_symbolic(LatticeSpec(2, 2), FieldMode.IPI_OVER_TWO, backend="numba")
        print(f"numba warmup (JIT): {time.perf_counter() - t0:.2f} s")

    header = f"{'kernel':24s} {'size':>8s}" + "".join(f" {b:>12s}" for b in backends)
    if len(backends) == 2:
        header += f" {'speedup':>9s}"
    print(header)
    for m, n in sizes:
        spec = LatticeSpec(m, n)
        for label, fn in (
            ("brute_force ipi2", lambda b: brute_force_partition(spec, c, FieldMode.IPI_OVER_TWO, backend=b)),
            ("symbolic counts", lambda b: brute_force_symbolic(spec, FieldMode.IPI_OVER_TWO, backend=b)),
        ):
            times = {b: _time(lambda: fn(b), args.repeat) for b in backends}
            row = f"{label:24s} {f'{m}x{n}':>8s}" + "".join(f" {times[b]:12.4f}" for b in backends)
            if len(backends) == 2:
                row += f" {times['numpy'] / times['numba']:8.1f}x"
            print(row)


if __name__ == "__main__":
    main()
