"""Rating-log ingestion, binarization and the sparse implicit-feedback matrix."""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DataError, ParseError

logger = logging.getLogger(__name__)

COLUMNS = ("userId", "itemId", "rating", "timestamp")
ITEM_ALIASES = {"movieId", "songId", "itemId"}


@dataclass
class RawInteractions:
    user: np.ndarray
    item: np.ndarray
    rating: np.ndarray
    timestamp: np.ndarray

    def __len__(self):
        return len(self.user)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        if not records:
            return cls(np.array([], dtype=object), np.array([], dtype=object),
                       np.array([], dtype=np.float64), np.array([], dtype=np.int64))
        users, items, ratings, stamps = zip(*records)
        return cls(np.array([str(u) for u in users], dtype=object),
                   np.array([str(i) for i in items], dtype=object),
                   np.asarray(ratings, dtype=np.float64),
                   np.asarray(stamps, dtype=np.int64))

    def select(self, mask):
        return RawInteractions(self.user[mask], self.item[mask], self.rating[mask], self.timestamp[mask])


@dataclass
class InteractionMatrix:
    """Binary user x item matrix in CSR form; each row sorted and unique."""

    user_ids: list
    item_ids: list
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def n_users(self):
        return len(self.user_ids)

    @property
    def n_items(self):
        return len(self.item_ids)

    @property
    def nnz(self):
        return int(self.indptr[-1])

    def row(self, u):
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def row_lengths(self):
        return np.diff(self.indptr)

    def subset(self, users):
        """CSR ``(indptr, indices)`` restricted to ``users``, in that order."""
        return csr_rows(self.indptr, self.indices, users)

    def to_dense(self, users=None, dtype=np.float32):
        from .._backend import densify_rows

        users = np.arange(self.n_users) if users is None else np.asarray(users)
        return densify_rows(self.indptr, self.indices, users, self.n_items, dtype)

    def __eq__(self, other):
        if not isinstance(other, InteractionMatrix):
            return NotImplemented
        return (list(self.user_ids) == list(other.user_ids)
                and list(self.item_ids) == list(other.item_ids)
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    @classmethod
    def from_rows(cls, rows, n_items=None, user_ids=None, item_ids=None):
        rows = [np.unique(np.asarray(r, dtype=np.int64)) for r in rows]
        if n_items is None:
            n_items = max((int(r.max()) + 1 for r in rows if len(r)), default=0)
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(r) for r in rows])
        indices = (np.concatenate(rows) if rows else np.array([])).astype(np.int32)
        user_ids = [str(u) for u in range(len(rows))] if user_ids is None else list(user_ids)
        item_ids = [str(i) for i in range(n_items)] if item_ids is None else list(item_ids)
        return cls(user_ids, item_ids, indptr, indices)


def csr_rows(indptr, indices, rows):
    rows = np.asarray(rows, dtype=np.int64)
    starts, ends = indptr[rows], indptr[rows + 1]
    lengths = ends - starts
    new_indptr = np.zeros(len(rows) + 1, dtype=np.int64)
    new_indptr[1:] = np.cumsum(lengths)
    if lengths.sum() == 0:
        return new_indptr, np.array([], dtype=np.int32)
    take = np.concatenate([np.arange(s, e) for s, e in zip(starts, ends)])
    return new_indptr, indices[take].astype(np.int32)


def load_ratings(path):
    """Read a ``userId,itemId,rating,timestamp`` CSV into :class:`RawInteractions`."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"ratings file not found: {path}")
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), None)
    if header is None:
        raise ParseError(f"{path}:1: empty file, expected header {','.join(COLUMNS)}")
    header = [h.strip() for h in header]
    if len(header) != 4 or header[0] != "userId" or header[1] not in ITEM_ALIASES \
            or header[2] != "rating" or header[3] != "timestamp":
        raise ParseError(f"{path}:1: bad header {header}, expected {','.join(COLUMNS)}")
    try:
        frame = pd.read_csv(path, dtype={header[0]: str, header[1]: str, "rating": np.float64,
                                         "timestamp": np.int64},
                            skip_blank_lines=True, on_bad_lines="error")
        if frame.isna().any().any():
            raise ValueError("missing values")
    except (ValueError, pd.errors.ParserError) as exc:
        _locate_bad_line(path)
        raise ParseError(f"{path}: {exc}") from exc
    raw = RawInteractions(frame.iloc[:, 0].to_numpy(dtype=object),
                          frame.iloc[:, 1].to_numpy(dtype=object),
                          frame["rating"].to_numpy(dtype=np.float64),
                          frame["timestamp"].to_numpy(dtype=np.int64))
    if len(raw) == 0:
        logger.warning("%s contains a header but no ratings", path)
    logger.info("read %d ratings from %s", len(raw), path)
    return raw


def _locate_bad_line(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(f"{path}:{lineno}: expected 4 fields, got {len(row)}")
            user, item, rating, stamp = (f.strip() for f in row)
            if not user or not item:
                raise ParseError(f"{path}:{lineno}: empty user or item id")
            try:
                value = float(rating)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: rating {rating!r} is not a number") from None
            if not np.isfinite(value):
                raise ParseError(f"{path}:{lineno}: rating {rating!r} is not finite")
            try:
                int(stamp)
            except ValueError:
                raise ParseError(f"{path}:{lineno}: timestamp {stamp!r} is not an integer") from None


def _id_order(ids):
    try:
        keys = [int(x) for x in ids]
    except ValueError:
        return sorted(ids)
    return [x for _, x in sorted(zip(keys, ids))]


def preprocess(raw, rating_threshold=4.0, min_user_interactions=5, min_item_interactions=1):
    """Binarize, deduplicate and iteratively filter until every survivor meets the minimums."""
    if min(rating_threshold, min_user_interactions, min_item_interactions) < 0:
        raise ValueError("thresholds must be non-negative")
    keep = raw.rating >= rating_threshold
    pairs = pd.DataFrame({"u": raw.user[keep], "i": raw.item[keep]}).drop_duplicates()
    while True:
        n_before = len(pairs)
        if min_item_interactions > 1:
            counts = pairs.groupby("i")["u"].transform("size")
            pairs = pairs[counts >= min_item_interactions]
        if min_user_interactions > 1:
            counts = pairs.groupby("u")["i"].transform("size")
            pairs = pairs[counts >= min_user_interactions]
        if len(pairs) == n_before:
            break
    if pairs.empty:
        raise DataError(
            f"no interactions left after preprocessing (rating >= {rating_threshold}, "
            f"users >= {min_user_interactions}, items >= {min_item_interactions}); "
            "relax the thresholds")
    user_ids = _id_order(pairs["u"].unique().tolist())
    item_ids = _id_order(pairs["i"].unique().tolist())
    u_index = pd.Index(user_ids).get_indexer(pairs["u"])
    i_index = pd.Index(item_ids).get_indexer(pairs["i"])
    order = np.lexsort((i_index, u_index))
    u_sorted, i_sorted = u_index[order], i_index[order]
    indptr = np.zeros(len(user_ids) + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(u_sorted, minlength=len(user_ids)))
    return InteractionMatrix(user_ids, item_ids, indptr, i_sorted.astype(np.int32))
