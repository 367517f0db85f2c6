"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy kernels
are used. Set ``RECVAE_PURE_PYTHON=1`` to force the fallback.
"""
import os

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("RECVAE_PURE_PYTHON"):
        raise ImportError("pure python backend requested")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "python"


def _impl(backend):
    return BACKENDS[backend or BACKEND]


def _csr(indptr, indices):
    return (np.ascontiguousarray(indptr, dtype=np.int64),
            np.ascontiguousarray(indices, dtype=np.int32))


def densify_rows(indptr, indices, rows, n_items, dtype=np.float32, backend=None):
    """Dense 0/1 matrix for the CSR rows ``rows``."""
    indptr, indices = _csr(indptr, indices)
    rows = np.ascontiguousarray(rows, dtype=np.int64)
    out = np.zeros((len(rows), n_items), dtype=dtype)
    _impl(backend).densify_rows(indptr, indices, rows, out)
    return out


def exclude_items(scores, indptr, indices, backend=None):
    """Set ``scores[r, items of row r]`` to -inf in place; returns ``scores``."""
    indptr, indices = _csr(indptr, indices)
    if not scores.flags.c_contiguous:
        raise ValueError("scores must be C-contiguous")
    _impl(backend).exclude_items(scores, indptr, indices)
    return scores


def top_k(scores, k, backend=None):
    """Indices of the ``k`` highest scores per row, best first.

    Ties go to the lower item index; NaN ranks as -inf.
    """
    scores = np.ascontiguousarray(scores)
    if scores.dtype not in (np.float32, np.float64):
        scores = scores.astype(np.float64)
    k = min(int(k), scores.shape[1])
    out = np.zeros((scores.shape[0], k), dtype=np.int64)
    if k > 0:
        _impl(backend).top_k(scores, k, out)
    return out


def ranking_metrics(ranked, holdout_indptr, holdout_indices, ks, n_items, backend=None):
    """Recall@k and NDCG@k for each row of ``ranked`` against CSR holdout sets.

    Returns two ``(n_rows, len(ks))`` float64 arrays; rows with an empty
    holdout are NaN.
    """
    ranked = np.ascontiguousarray(ranked, dtype=np.int64)
    indptr, indices = _csr(holdout_indptr, holdout_indices)
    ks = np.ascontiguousarray(ks, dtype=np.int64)
    if len(ks) and (ks.min() < 1 or ks.max() > ranked.shape[1]):
        raise ValueError(f"ks must lie in [1, {ranked.shape[1]}]")
    recall = np.empty((ranked.shape[0], len(ks)), dtype=np.float64)
    ndcg = np.empty_like(recall)
    _impl(backend).ranking_metrics(ranked, indptr, indices, ks, n_items, recall, ndcg)
    return recall, ndcg
