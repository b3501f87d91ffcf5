#!/usr/bin/env python3
"""Time the numba kernel builds against the plain numpy/Python fallbacks.

Runs each kernel on a sizable input a few times and prints the best wall time
per build plus the speedup. The numba timings exclude the first (compiling)
call. Usage:

    python benchmarks/bench_backends.py [--scale 1.0]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from ergoset import _kernels, er_digraph, transition_matrix


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_scc(scale):
    n = int(4000 * scale)
    g = er_digraph(n, 2.5 / n, np.random.default_rng(0))
    args = (g.node_count, g.out_ptr, g.out_idx)
    return "scc_labels", f"ER({n}, 2.5/{n})", args, {}


def bench_absorb(scale):
    n = int(1500 * scale)
    g = er_digraph(n, 3.0 / n, np.random.default_rng(1))
    tm = transition_matrix(g)
    start = np.full(n, 1.0 / n)
    # step cap guards against draws whose terminal classes trap mass
    args = (tm.indptr, tm.indices, tm.prob, tm.absorbing, start, 1e-12, 5000)
    return "absorb_loop", f"walk on ER({n}, 3/{n}) to 1e-12", args, {}


def bench_swap(scale):
    n = int(800 * scale)
    g = er_digraph(n, 4.0 / n, np.random.default_rng(2))
    src, dst, _ = g.edge_arrays()
    m = src.size
    exists = np.zeros((n, n), dtype=bool)
    exists[src, dst] = True
    rng = np.random.default_rng(3)
    picks_a = rng.integers(0, m, size=20 * m).astype(np.int64)
    picks_b = rng.integers(0, m, size=20 * m).astype(np.int64)

    def fresh():
        return (src.copy(), dst.copy(), exists.copy(), picks_a, picks_b)

    return "edge_swap", f"{20 * m} swap attempts on {m} edges", fresh, {"fresh": True}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--scale", type=float, default=1.0,
                        help="input size multiplier")
    opts = parser.parse_args()

    if _kernels.scc_labels_numba is None:
        print("numba build unavailable (ERGOSET_BACKEND=numpy or numba missing); "
              "timing the plain build only.")

    print(f"{'kernel':<12} {'input':<34} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for bench in (bench_scc, bench_absorb, bench_swap):
        name, desc, args, flags = bench(opts.scale)
        plain = getattr(_kernels, f"{name}_plain")
        compiled = getattr(_kernels, f"{name}_numba")

        if flags.get("fresh"):
            t_plain = best_of(lambda: plain(*args()))
            t_jit = None
            if compiled is not None:
                compiled(*args())  # compile
                t_jit = best_of(lambda: compiled(*args()))
        else:
            t_plain = best_of(lambda: plain(*args))
            t_jit = None
            if compiled is not None:
                compiled(*args)  # compile
                t_jit = best_of(lambda: compiled(*args))

        jit_txt = f"{t_jit * 1e3:9.2f}ms" if t_jit is not None else "      n/a"
        ratio = f"{t_plain / t_jit:7.1f}x" if t_jit else "     n/a"
        print(f"{name:<12} {desc:<34} {jit_txt:>10} {t_plain * 1e3:9.2f}ms {ratio:>8}")


if __name__ == "__main__":
    main()
