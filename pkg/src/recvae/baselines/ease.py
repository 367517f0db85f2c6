"""Closed-form item-item linear model with a zero-diagonal constraint."""
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from ..errors import CapabilityError, FormatError
from ..model.checkpoint import load_checkpoint, save_checkpoint

MAX_DENSE_ITEMS = 20_000


@dataclass(frozen=True)
class EaseModel:
    B: np.ndarray
    lam: float

    def predict_scores(self, x):
        scores = np.asarray(x, dtype=self.B.dtype) @ self.B
        scores[np.asarray(x) > 0] = -np.inf
        return scores

    __call__ = predict_scores

    def save(self, path):
        save_checkpoint(path, "ease", {"lambda": self.lam, "n_items": int(self.B.shape[0])},
                        {"ease.B": self.B})

    @classmethod
    def load(cls, path):
        kind, hyper, tensors = load_checkpoint(path)
        if kind != "ease":
            raise FormatError(f"checkpoint holds a {kind!r} model, expected 'ease'")
        return cls(tensors["ease.B"], hyper["lambda"])


def _as_matrix(X, users=None):
    from ..data.interactions import InteractionMatrix

    if isinstance(X, InteractionMatrix):
        if users is None:
            users = np.arange(X.n_users)
        indptr, indices = X.subset(users)
        return sp.csr_matrix((np.ones(len(indices)), indices, indptr), shape=(len(users), X.n_items))
    return X


def ease_fit(X, lam, users=None, max_items=MAX_DENSE_ITEMS):
    """Minimize ``||X - XB||^2 + lam ||B||^2`` subject to ``diag(B) = 0``.

    ``X`` is an :class:`InteractionMatrix` (optionally restricted to
    ``users``), a scipy sparse matrix or a dense array.
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    X = _as_matrix(X, users)
    n_items = X.shape[1]
    if n_items > max_items:
        raise CapabilityError(
            f"{n_items} items exceeds the dense EASE limit of {max_items}; "
            f"raise max_items only if a {n_items}x{n_items} float64 Gram matrix fits in memory")
    gram = X.T @ X
    gram = gram.toarray() if sp.issparse(gram) else np.array(gram, dtype=np.float64)
    gram = gram.astype(np.float64) + lam * np.eye(n_items)
    P = scipy.linalg.cho_solve(scipy.linalg.cho_factor(gram), np.eye(n_items))
    B = -P / np.diag(P)
    np.fill_diagonal(B, 0.0)
    return EaseModel(B, float(lam))
