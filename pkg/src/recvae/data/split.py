"""Strong-generalization user split and per-user fold-in/holdout partition."""
import math
from dataclasses import dataclass

import numpy as np

from ..errors import DataError


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def fold_in_split(row, fraction=0.8, seed=0):
    """Randomly partition one user's items into (fold_in, holdout), both sorted.

    ``|fold_in| = max(1, floor(fraction * n))`` and the holdout keeps at least
    one item when ``n >= 2``. A single-item row goes entirely to fold-in.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must lie in (0, 1), got {fraction}")
    row = np.asarray(row)
    n = len(row)
    if n == 0:
        raise ValueError("cannot split an empty feedback row")
    if n == 1:
        return row.copy(), row[:0].copy()
    n_fold = min(max(1, math.floor(fraction * n + 1e-9)), n - 1)
    perm = _rng(seed).permutation(n)
    return np.sort(row[perm[:n_fold]]), np.sort(row[perm[n_fold:]])


@dataclass
class HeldOutUsers:
    """Held-out users with their fold-in (encoder input) and holdout (target) items."""

    users: np.ndarray
    fold_in_indptr: np.ndarray
    fold_in_indices: np.ndarray
    holdout_indptr: np.ndarray
    holdout_indices: np.ndarray

    def __len__(self):
        return len(self.users)

    @property
    def usable(self):
        return np.diff(self.holdout_indptr) > 0

    @property
    def n_unusable(self):
        return int((~self.usable).sum())

    def fold_in(self, j):
        return self.fold_in_indices[self.fold_in_indptr[j]:self.fold_in_indptr[j + 1]]

    def holdout(self, j):
        return self.holdout_indices[self.holdout_indptr[j]:self.holdout_indptr[j + 1]]

    @classmethod
    def from_parts(cls, users, fold_ins, holdouts):
        def pack(parts):
            indptr = np.zeros(len(parts) + 1, dtype=np.int64)
            indptr[1:] = np.cumsum([len(p) for p in parts])
            data = np.concatenate(parts) if parts else np.array([])
            return indptr, data.astype(np.int32)

        return cls(np.asarray(users, dtype=np.int64), *pack(fold_ins), *pack(holdouts))

    def __eq__(self, other):
        return all(np.array_equal(getattr(self, f), getattr(other, f))
                   for f in ("users", "fold_in_indptr", "fold_in_indices",
                             "holdout_indptr", "holdout_indices"))


@dataclass
class DatasetSplit:
    train_users: np.ndarray
    validation: HeldOutUsers
    test: HeldOutUsers

    def heldout(self, which):
        if which in ("validation", "val"):
            return self.validation
        if which == "test":
            return self.test
        raise ValueError(f"unknown held-out set {which!r}")

    def __eq__(self, other):
        return (np.array_equal(self.train_users, other.train_users)
                and self.validation == other.validation and self.test == other.test)


def split_users(matrix, n_heldout, seed=0, fraction=0.8):
    """Hold out ``n_heldout`` validation and ``n_heldout`` test users; the rest train."""
    if n_heldout < 1 or 2 * n_heldout >= matrix.n_users:
        raise DataError(f"cannot hold out 2 x {n_heldout} users from {matrix.n_users}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(matrix.n_users)
    val = np.sort(perm[:n_heldout])
    test = np.sort(perm[n_heldout:2 * n_heldout])
    train = np.sort(perm[2 * n_heldout:])

    def held(users):
        parts = [fold_in_split(matrix.row(u), fraction, rng) for u in users]
        return HeldOutUsers.from_parts(users, [p[0] for p in parts], [p[1] for p in parts])

    return DatasetSplit(train.astype(np.int64), held(val), held(test))
