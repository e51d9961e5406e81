"""Top-k dot-product scan kernels.

The exhaustive cosine scan is the only hot loop in the package, so it
gets two interchangeable implementations: a numpy one (matmul plus a
stable argsort) and a numba one that fuses the dot products with an
insertion buffer and never materializes the full sort. Selection is by
the MMQA_KERNEL environment variable: ``auto`` (default, numba when
importable), ``numba``, or ``numpy``.

Both kernels return (row_indices, scores) sorted by descending score,
breaking ties by ascending row index; callers keep index rows sorted by
item id so the tie order is the id order.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via MMQA_KERNEL=numpy
    HAVE_NUMBA = False


def topk_numpy(matrix: np.ndarray, query: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    scores = matrix @ query
    order = np.argsort(-scores, kind="stable")[:k]
    return order, scores[order]


if HAVE_NUMBA:

    @njit(cache=True)
    def _topk_scan(matrix, query, k):  # pragma: no cover - compiled
        n, dim = matrix.shape
        size = min(k, n)
        idx = np.empty(size, dtype=np.int64)
        val = np.empty(size, dtype=np.float64)
        count = 0
        for row in range(n):
            score = 0.0
            for col in range(dim):
                score += matrix[row, col] * query[col]
            if count < size:
                pos = count
                while pos > 0 and val[pos - 1] < score:
                    val[pos] = val[pos - 1]
                    idx[pos] = idx[pos - 1]
                    pos -= 1
                val[pos] = score
                idx[pos] = row
                count += 1
            elif score > val[size - 1]:
                pos = size - 1
                while pos > 0 and val[pos - 1] < score:
                    val[pos] = val[pos - 1]
                    idx[pos] = idx[pos - 1]
                    pos -= 1
                val[pos] = score
                idx[pos] = row
        return idx, val

    def topk_numba(matrix: np.ndarray, query: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        if len(matrix) == 0 or k <= 0:
            empty = np.empty(0, dtype=np.int64)
            return empty, empty.astype(np.float64)
        return _topk_scan(
            np.ascontiguousarray(matrix), np.ascontiguousarray(query), k
        )

else:
    topk_numba = None


def select_kernel(name: str | None = None):
    """Resolve the top-k kernel; ``name`` overrides MMQA_KERNEL."""
    if name is None:
        name = os.environ.get("MMQA_KERNEL", "auto")
    if name == "numpy":
        return topk_numpy
    if name == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("MMQA_KERNEL=numba but numba is not installed")
        return topk_numba
    if name == "auto":
        return topk_numba if HAVE_NUMBA else topk_numpy
    raise ValueError(f"unknown kernel {name!r} (expected auto, numba, or numpy)")
