import numpy as np


class Popularity:
    """Ranks items by how many training users interacted with them."""

    def __init__(self, matrix, users=None):
        users = np.arange(matrix.n_users) if users is None else users
        _, indices = matrix.subset(users)
        self.counts = np.bincount(indices, minlength=matrix.n_items).astype(np.float64)

    def predict_scores(self, x):
        x = np.atleast_2d(x)
        scores = np.tile(self.counts, (len(x), 1))
        scores[x > 0] = -np.inf
        return scores

    __call__ = predict_scores
