"""Planted low-rank multinomial feedback for scaled experiments."""
import csv

import numpy as np

from .interactions import InteractionMatrix


def planted_factor_data(n_users=2000, n_items=300, n_factors=8, seed=0, signal=2.0,
                        popularity_scale=1.0, mean_interactions=30, min_interactions=5):
    """Sample users from ``softmax(signal * V u + b)`` with ``u ~ N(0, I)``.

    Each user's row holds ``n_u`` distinct items drawn without replacement
    (Gumbel top-``n_u``) from their multinomial; ``n_u`` is log-normal,
    clipped to ``[min_interactions, n_items // 2]``.
    """
    rng = np.random.default_rng(seed)
    item_factors = rng.standard_normal((n_items, n_factors)) / np.sqrt(n_factors)
    item_bias = popularity_scale * rng.standard_normal(n_items)
    user_factors = rng.standard_normal((n_users, n_factors))
    logits = signal * user_factors @ item_factors.T + item_bias
    sizes = rng.lognormal(np.log(mean_interactions), 0.5, n_users).astype(int)
    sizes = np.clip(sizes, min_interactions, n_items // 2)
    keys = logits + rng.gumbel(size=logits.shape)
    order = np.argsort(-keys, axis=1)
    rows = [order[u, :sizes[u]] for u in range(n_users)]
    return InteractionMatrix.from_rows(rows, n_items)


def write_ratings_csv(path, matrix, rating=5.0):
    """Dump a matrix as a ``userId,itemId,rating,timestamp`` log."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["userId", "itemId", "rating", "timestamp"])
        stamp = 0
        for u in range(matrix.n_users):
            for i in matrix.row(u):
                writer.writerow([matrix.user_ids[u], matrix.item_ids[i], rating, stamp])
                stamp += 1
