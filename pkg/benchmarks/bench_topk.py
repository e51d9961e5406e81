"""Benchmark the two top-k scan kernels against each other.

Times the numba fused scan and the numpy matmul-plus-argsort fallback
over the same random unit vectors, checks they agree, and prints a
small table. Run from the repository root:

    python3 benchmarks/bench_topk.py
    python3 benchmarks/bench_topk.py --entries 200000 --dim 768
"""
import argparse
import time

import numpy as np

from mmqa._kernels import HAVE_NUMBA, topk_numba, topk_numpy


def unit_rows(rng, n, dim):
    rows = rng.normal(size=(n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def time_kernel(kernel, matrix, queries, k, repeats):
    """Best-of-N wall time for one pass over all queries, in seconds."""
    kernel(matrix, queries[0], k)  # warmup; compiles the numba path
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        for query in queries:
            kernel(matrix, query, k)
        best = min(best, time.perf_counter() - started)
    return best


def check_agreement(matrix, queries, k):
    for query in queries[:10]:
        idx_np, val_np = topk_numpy(matrix, query, k)
        idx_nb, val_nb = topk_numba(matrix, query, k)
        if not np.array_equal(idx_np, idx_nb):
            raise AssertionError(f"kernels disagree on rows: {idx_np} vs {idx_nb}")
        if not np.allclose(val_np, val_nb, atol=1e-12):
            raise AssertionError("kernels disagree on scores")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--entries", type=int, default=20_000)
    parser.add_argument("--dim", type=int, default=384)
    parser.add_argument("--queries", type=int, default=100)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    matrix = unit_rows(rng, args.entries, args.dim)
    queries = unit_rows(rng, args.queries, args.dim)

    print(
        f"entries={args.entries} dim={args.dim} queries={args.queries} "
        f"k={args.k} repeats={args.repeats}"
    )

    numpy_best = time_kernel(topk_numpy, matrix, queries, args.k, args.repeats)
    per_query_np = numpy_best / args.queries * 1e6
    print(f"numpy  {numpy_best:8.3f}s total  {per_query_np:10.1f}us/query")

    if not HAVE_NUMBA:
        print("numba  not installed; only the numpy kernel was timed")
        return

    check_agreement(matrix, queries, args.k)
    numba_best = time_kernel(topk_numba, matrix, queries, args.k, args.repeats)
    per_query_nb = numba_best / args.queries * 1e6
    ratio = numpy_best / numba_best
    print(f"numba  {numba_best:8.3f}s total  {per_query_nb:10.1f}us/query")
    print(f"numba is {ratio:.2f}x the numpy throughput on this shape")


if __name__ == "__main__":
    main()
