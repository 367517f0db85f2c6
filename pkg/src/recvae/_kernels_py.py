"""Numpy reference kernels; semantics source for the compiled ``_kernels``."""
import numpy as np


def densify_rows(indptr, indices, rows, out):
    starts = indptr[rows]
    lengths = indptr[rows + 1] - starts
    row_ids = np.repeat(np.arange(len(rows)), lengths)
    offsets = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    out[row_ids, indices[np.repeat(starts, lengths) + offsets]] = 1


def exclude_items(scores, indptr, indices):
    lengths = np.diff(indptr)
    scores[np.repeat(np.arange(scores.shape[0]), lengths), indices] = -np.inf


def top_k(scores, k, out):
    keyed = np.where(np.isnan(scores), np.inf, -scores)
    # stable sort: ties resolved by ascending item index
    out[:] = np.argsort(keyed, axis=1, kind="stable")[:, :k]


def ranking_metrics(ranked, indptr, indices, ks, n_items, recall, ndcg):
    depth = ranked.shape[1]
    disc = 1.0 / np.log(np.arange(2, depth + 2, dtype=np.float64))
    cum_idcg = np.concatenate([[0.0], np.cumsum(disc)])
    lengths = np.diff(indptr)
    target = np.zeros((ranked.shape[0], n_items), dtype=bool)
    target[np.repeat(np.arange(ranked.shape[0]), lengths), indices] = True
    hits = np.take_along_axis(target, ranked, axis=1)
    cum_hits = np.concatenate([np.zeros((len(hits), 1)), np.cumsum(hits, axis=1)], axis=1)
    cum_dcg = np.concatenate([np.zeros((len(hits), 1)), np.cumsum(hits * disc, axis=1)], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        for q, k in enumerate(ks):
            lim = np.minimum(k, lengths)
            recall[:, q] = np.where(lengths > 0, cum_hits[:, k] / np.maximum(lim, 1), np.nan)
            ndcg[:, q] = np.where(lengths > 0, cum_dcg[:, k] / cum_idcg[lim], np.nan)
