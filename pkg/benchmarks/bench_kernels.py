"""Benchmark the numba kernels against the pure-numpy fallbacks.

Run: python benchmarks/bench_kernels.py [--repeat N]
The numba column appears only when numba is importable; the first call of
each jitted kernel is excluded as compilation warm-up.
"""

import argparse
import time

import numpy as np

from sndetect import _kernels


def make_pagerank_case(n_nodes=3000, n_edges=60000, seed=0):
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n_nodes, size=n_edges)
    dst = rng.integers(0, n_nodes, size=n_edges)
    ratio = rng.random(n_edges)
    scores = np.ones(n_nodes)
    return (src, dst, ratio, scores, 0.85)


def make_dot_case(n_entries=60000, dim=128, seed=0):
    rng = np.random.default_rng(seed)
    matrix = rng.standard_normal((n_entries, dim))
    query = rng.standard_normal(dim)
    return (matrix, query)


def make_logreg_case(n_docs=1500, n_features=4000, nnz_per_doc=40, n_classes=3, seed=0):
    rng = np.random.default_rng(seed)
    indptr = np.arange(0, (n_docs + 1) * nnz_per_doc, nnz_per_doc, dtype=np.int64)
    indices = np.sort(
        rng.integers(0, n_features, size=(n_docs, nnz_per_doc), dtype=np.int64), axis=1
    ).ravel()
    data = rng.random(n_docs * nnz_per_doc)
    y_idx = rng.integers(0, n_classes, size=n_docs)
    weights = rng.standard_normal((n_classes, n_features)) * 0.01
    intercepts = np.zeros(n_classes)
    return (indptr, indices, data, y_idx, weights, intercepts, 1.0)


CASES = [
    ("pagerank_sweep", make_pagerank_case),
    ("dot_scores", make_dot_case),
    ("logreg_obj_grad", make_logreg_case),
]


def time_kernel(fn, args, repeat):
    fn(*args)  # warm-up (JIT compile on the numba path)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    print(f"active backend: {_kernels.ACTIVE_BACKEND}")
    print(f"{'kernel':<18} " + " ".join(f"{b + ' (ms)':>14}" for b in backends) + f" {'speedup':>9}")
    for name, make_case in CASES:
        case = make_case()
        times = {}
        for backend in backends:
            kernel = _kernels.get_kernels(backend)[name]
            times[backend] = time_kernel(kernel, case, args.repeat)
        row = f"{name:<18} " + " ".join(f"{times[b] * 1e3:>14.3f}" for b in backends)
        if "numba" in times:
            row += f" {times['numpy'] / times['numba']:>8.2f}x"
        print(row)


if __name__ == "__main__":
    main()
