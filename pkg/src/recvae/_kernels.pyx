"""Compiled ranking and batching kernels.

Semantics are defined by ``recvae._kernels_py``; both modules must agree on
every input, including tie-breaking (equal scores rank by lower item index)
and NaN handling (NaN ranks like -inf).
"""
import numpy as np

from libc.math cimport log, INFINITY
from libc.stdint cimport int32_t, int64_t, int8_t

ctypedef fused real_t:
    float
    double


def densify_rows(const int64_t[::1] indptr, const int32_t[::1] indices,
                 const int64_t[::1] rows, real_t[:, ::1] out):
    cdef Py_ssize_t r, j, u
    with nogil:
        for r in range(rows.shape[0]):
            u = rows[r]
            for j in range(indptr[u], indptr[u + 1]):
                out[r, indices[j]] = 1


def exclude_items(real_t[:, ::1] scores, const int64_t[::1] indptr,
                  const int32_t[::1] indices):
    cdef Py_ssize_t r, j
    with nogil:
        for r in range(scores.shape[0]):
            for j in range(indptr[r], indptr[r + 1]):
                scores[r, indices[j]] = -INFINITY


def top_k(real_t[:, ::1] scores, Py_ssize_t k, int64_t[:, ::1] out):
    cdef Py_ssize_t b, i, pos, filled
    cdef Py_ssize_t n = scores.shape[1]
    cdef double v
    cdef double[::1] best = np.empty(max(k, 1), dtype=np.float64)
    with nogil:
        for b in range(scores.shape[0]):
            filled = 0
            for i in range(n):
                v = scores[b, i]
                if v != v:
                    v = -INFINITY
                if filled == k:
                    if not v > best[k - 1]:
                        continue
                    pos = k - 1
                else:
                    pos = filled
                    filled += 1
                # strict comparison keeps earlier indices ahead on ties
                while pos > 0 and best[pos - 1] < v:
                    best[pos] = best[pos - 1]
                    out[b, pos] = out[b, pos - 1]
                    pos -= 1
                best[pos] = v
                out[b, pos] = i


def ranking_metrics(const int64_t[:, ::1] ranked, const int64_t[::1] indptr,
                    const int32_t[::1] indices, const int64_t[::1] ks,
                    Py_ssize_t n_items, double[:, ::1] recall, double[:, ::1] ndcg):
    cdef Py_ssize_t b, n, j, q, kk, h, lim
    cdef Py_ssize_t depth = ranked.shape[1]
    cdef Py_ssize_t nk = ks.shape[0]
    cdef double dcg, idcg
    cdef int8_t[::1] marker = np.zeros(n_items, dtype=np.int8)
    cdef double[::1] disc = 1.0 / np.log(np.arange(2, depth + 2, dtype=np.float64))
    cdef double[::1] cum_dcg = np.empty(depth + 1, dtype=np.float64)
    cdef double[::1] cum_idcg = np.empty(depth + 1, dtype=np.float64)
    cdef int64_t[::1] cum_hits = np.empty(depth + 1, dtype=np.int64)
    with nogil:
        cum_idcg[0] = 0.0
        for n in range(depth):
            cum_idcg[n + 1] = cum_idcg[n] + disc[n]
        for b in range(ranked.shape[0]):
            h = indptr[b + 1] - indptr[b]
            if h == 0:
                for q in range(nk):
                    recall[b, q] = 0.0 / 0.0
                    ndcg[b, q] = 0.0 / 0.0
                continue
            for j in range(indptr[b], indptr[b + 1]):
                marker[indices[j]] = 1
            cum_dcg[0] = 0.0
            cum_hits[0] = 0
            for n in range(depth):
                if marker[ranked[b, n]]:
                    cum_hits[n + 1] = cum_hits[n] + 1
                    cum_dcg[n + 1] = cum_dcg[n] + disc[n]
                else:
                    cum_hits[n + 1] = cum_hits[n]
                    cum_dcg[n + 1] = cum_dcg[n]
            for q in range(nk):
                kk = ks[q]
                lim = kk if kk < h else h
                recall[b, q] = <double>cum_hits[kk] / <double>lim
                ndcg[b, q] = cum_dcg[kk] / cum_idcg[lim]
            for j in range(indptr[b], indptr[b + 1]):
                marker[indices[j]] = 0
