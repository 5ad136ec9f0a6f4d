"""Hot numeric kernels: numba-jitted fast path with a pure-numpy fallback.

Three inner loops dominate runtime (graph-rank sweeps, cosine scans, and
the classifier objective/gradient); everything else in the package is
string work. The active path is chosen at import time: numba when it is
importable, unless the environment variable ``SNDETECT_NUMBA`` is set to
``0``/``false``/``off``/``no``. Both paths are sequential on purpose so
that repeated runs are bitwise reproducible.
"""

import os

import numpy as np


def _numba_wanted() -> bool:
    value = os.environ.get("SNDETECT_NUMBA", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


# ---------------------------------------------------------------------------
# pure-numpy implementations


def pagerank_sweep_numpy(src, dst, ratio, scores, damping):
    """One synchronous rank update: new[i] = (1-d) + d * sum(ratio * scores[src])."""
    acc = np.zeros_like(scores)
    np.add.at(acc, dst, ratio * scores[src])
    return (1.0 - damping) + damping * acc


def dot_scores_numpy(matrix, query):
    """Dot product of every row against the query vector."""
    return matrix @ query


def logreg_obj_grad_numpy(indptr, indices, data, y_idx, weights, intercepts, inv_c):
    """Softmax cross-entropy (summed over rows) plus L2 penalty, with gradient.

    The design matrix is CSR; rows are the documents. Returns
    (objective, grad_weights, grad_intercepts).
    """
    n = indptr.shape[0] - 1
    n_classes, n_features = weights.shape
    rows = np.repeat(np.arange(n), np.diff(indptr))
    scores = np.tile(intercepts, (n, 1))
    np.add.at(scores, rows, data[:, None] * weights.T[indices])
    high = scores.max(axis=1)
    expd = np.exp(scores - high[:, None])
    tot = expd.sum(axis=1)
    arange_n = np.arange(n)
    obj = float(np.sum(high + np.log(tot) - scores[arange_n, y_idx]))
    diff = expd / tot[:, None]
    diff[arange_n, y_idx] -= 1.0
    grad_b = diff.sum(axis=0)
    grad_wt = np.zeros((n_features, n_classes))
    np.add.at(grad_wt, indices, data[:, None] * diff[rows])
    obj += 0.5 * inv_c * float(np.sum(weights * weights))
    grad_w = grad_wt.T + inv_c * weights
    return obj, grad_w, grad_b


# ---------------------------------------------------------------------------
# numba fast path

HAVE_NUMBA = False
if _numba_wanted():
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:
        HAVE_NUMBA = False

if HAVE_NUMBA:

    @njit(cache=True)
    def pagerank_sweep_numba(src, dst, ratio, scores, damping):
        n = scores.shape[0]
        acc = np.zeros(n)
        for e in range(src.shape[0]):
            acc[dst[e]] += ratio[e] * scores[src[e]]
        out = np.empty(n)
        for i in range(n):
            out[i] = (1.0 - damping) + damping * acc[i]
        return out

    @njit(cache=True)
    def dot_scores_numba(matrix, query):
        n, dim = matrix.shape
        out = np.empty(n)
        for i in range(n):
            s = 0.0
            for j in range(dim):
                s += matrix[i, j] * query[j]
            out[i] = s
        return out

    @njit(cache=True)
    def logreg_obj_grad_numba(indptr, indices, data, y_idx, weights, intercepts, inv_c):
        n = indptr.shape[0] - 1
        n_classes, n_features = weights.shape
        grad_w = np.zeros((n_classes, n_features))
        grad_b = np.zeros(n_classes)
        scores = np.empty(n_classes)
        obj = 0.0
        for i in range(n):
            for c in range(n_classes):
                scores[c] = intercepts[c]
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                val = data[p]
                for c in range(n_classes):
                    scores[c] += val * weights[c, j]
            high = scores[0]
            for c in range(1, n_classes):
                if scores[c] > high:
                    high = scores[c]
            tot = 0.0
            for c in range(n_classes):
                tot += np.exp(scores[c] - high)
            obj += high + np.log(tot) - scores[y_idx[i]]
            for c in range(n_classes):
                diff = np.exp(scores[c] - high) / tot
                if c == y_idx[i]:
                    diff -= 1.0
                grad_b[c] += diff
                for p in range(indptr[i], indptr[i + 1]):
                    grad_w[c, indices[p]] += diff * data[p]
        obj += 0.5 * inv_c * np.sum(weights * weights)
        for c in range(n_classes):
            for j in range(n_features):
                grad_w[c, j] += inv_c * weights[c, j]
        return obj, grad_w, grad_b


if HAVE_NUMBA:
    ACTIVE_BACKEND = "numba"
    pagerank_sweep = pagerank_sweep_numba
    # BLAS-backed matvec beats the scalar loop (see benchmarks/bench_kernels.py),
    # so the dense similarity scan stays on numpy even on this path.
    dot_scores = dot_scores_numpy
    logreg_obj_grad = logreg_obj_grad_numba
else:
    ACTIVE_BACKEND = "numpy"
    pagerank_sweep = pagerank_sweep_numpy
    dot_scores = dot_scores_numpy
    logreg_obj_grad = logreg_obj_grad_numpy


def get_kernels(backend: str) -> dict:
    """Return the named kernel set; used by the benchmark to compare paths."""
    if backend == "numpy":
        return {
            "pagerank_sweep": pagerank_sweep_numpy,
            "dot_scores": dot_scores_numpy,
            "logreg_obj_grad": logreg_obj_grad_numpy,
        }
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend not available (not installed or disabled)")
        return {
            "pagerank_sweep": pagerank_sweep_numba,
            "dot_scores": dot_scores_numba,
            "logreg_obj_grad": logreg_obj_grad_numba,
        }
    raise ValueError(f"unknown kernel backend: {backend!r}")
