import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recvae.data import HeldOutUsers, DatasetSplit
from recvae.evaluation import MetricsReport, bootstrap_ci, evaluate, ndcg_at_k, parse_metric, recall_at_k


def test_recall_examples():
    assert recall_at_k([1, 2, 3], {1, 2, 3, 4}, 3) == 1.0
    assert recall_at_k(["a", "b", "c"], {"b", "c"}, 2) == 0.5
    assert recall_at_k([5, 6], {1}, 2) == 0.0


def test_ndcg_examples():
    assert ndcg_at_k([7, 1, 2], {7}, 5) == 1.0
    assert ndcg_at_k([0, 7] + list(range(8, 100)), {7}, 100) == pytest.approx(math.log(2) / math.log(3))
    assert ndcg_at_k([1, 2], {9}, 2) == 0.0


def test_metrics_reject_bad_input():
    with pytest.raises(ValueError):
        recall_at_k([1], set(), 1)
    with pytest.raises(ValueError):
        ndcg_at_k([1], {1}, 0)


rankings = st.permutations(list(range(12)))
holdouts = st.sets(st.integers(0, 11), min_size=1)


@settings(max_examples=100, deadline=None)
@given(rankings, holdouts)
def test_recall_non_decreasing_in_k(ranked, holdout):
    values = [recall_at_k(ranked, holdout, k) for k in range(1, 13)]
    assert all(0 <= v <= 1 for v in values)
    # hits only grow, but the normalizer also grows until k reaches |holdout|
    hits = [v * min(k, len(holdout)) for k, v in zip(range(1, 13), values)]
    assert hits == sorted(hits)
    assert all(b >= a for a, b in zip(values[len(holdout) - 1:], values[len(holdout):]))


@settings(max_examples=100, deadline=None)
@given(rankings, holdouts, st.integers(1, 12))
def test_ndcg_one_iff_hits_fill_top(ranked, holdout, k):
    value = ndcg_at_k(ranked, holdout, k)
    top_full = set(ranked[:min(k, len(holdout))]) <= holdout
    assert (abs(value - 1.0) < 1e-12) == top_full


@settings(max_examples=60, deadline=None)
@given(rankings, holdouts, st.integers(1, 12), st.randoms(use_true_random=False))
def test_metrics_ignore_items_outside_top_and_holdout(ranked, holdout, k, rnd):
    tail = ranked[k:]
    free = [i for i in tail if i not in holdout]
    shuffled = free[:]
    rnd.shuffle(shuffled)
    swap = dict(zip(free, shuffled))
    permuted = ranked[:k] + [swap.get(i, i) for i in tail]
    assert recall_at_k(permuted, holdout, k) == recall_at_k(ranked, holdout, k)
    assert ndcg_at_k(permuted, holdout, k) == ndcg_at_k(ranked, holdout, k)


def _split(n_items=30, n_users=25, seed=0):
    rng = np.random.default_rng(seed)
    folds, holds = [], []
    for _ in range(n_users):
        items = rng.permutation(n_items)[:rng.integers(3, 12)]
        folds.append(np.sort(items[:2]))
        holds.append(np.sort(items[2:]))
    held = HeldOutUsers.from_parts(np.arange(n_users), folds, holds)
    return DatasetSplit(np.arange(0), held, held), folds, holds


class _Oracle:
    def __init__(self, holds, sign=1.0):
        self.holds, self.sign, self.calls = holds, sign, 0

    def __call__(self, x):
        scores = np.zeros(x.shape)
        for r in range(len(x)):
            scores[r, self.holds[self.calls + r]] = self.sign
        self.calls += len(x)
        return scores


def test_oracle_scorer_scores_perfectly():
    split, _, holds = _split()
    report = evaluate(_Oracle(holds), 30, split, batch_size=7)
    assert all(report[m].mean == pytest.approx(1.0) for m in ("recall@20", "ndcg@100"))


def test_adversarial_scorer_scores_low():
    split, _, holds = _split()
    report = evaluate(_Oracle(holds, -1.0), 30, split, metrics=("recall@5",), batch_size=7)
    assert report["recall@5"].mean == 0.0


def test_report_mean_equals_recomputed_mean():
    split, folds, holds = _split(seed=3)
    rng = np.random.default_rng(9)
    table = rng.standard_normal((25, 30))

    def scorer(x, calls=[0]):
        out = table[calls[0]:calls[0] + len(x)]
        calls[0] += len(x)
        return out

    report = evaluate(scorer, 30, split, metrics=("recall@5", "ndcg@10"), batch_size=25)
    manual = {"recall@5": [], "ndcg@10": []}
    for u in range(25):
        order = [i for i in np.argsort(-table[u], kind="stable") if i not in set(folds[u])]
        manual["recall@5"].append(recall_at_k(order, set(holds[u]), 5))
        manual["ndcg@10"].append(ndcg_at_k(order, set(holds[u]), 10))
    for name, values in manual.items():
        assert report[name].mean == pytest.approx(np.mean(values), abs=1e-12)
        assert report[name].n == 25


def test_monotone_transform_preserves_report():
    split, _, _ = _split(seed=4)
    table = np.random.default_rng(2).standard_normal((25, 30))
    a = evaluate(lambda x: table[:len(x)], 30, split, batch_size=25)
    b = evaluate(lambda x: np.exp(3 * table[:len(x)]) + 1, 30, split, batch_size=25)
    assert a.to_dict() == b.to_dict()


def test_bootstrap_interval_behaviour():
    assert bootstrap_ci([0.5] * 50) == 0.0
    wide = bootstrap_ci(np.random.default_rng(0).random(100))
    narrow = bootstrap_ci(np.random.default_rng(0).random(10_000))
    assert narrow < wide


def test_report_round_trips_and_renders():
    split, _, holds = _split()
    report = evaluate(_Oracle(holds), 30, split)
    again = MetricsReport.from_dict(report.to_dict())
    assert again.to_dict() == report.to_dict()
    assert "ndcg@100" in report.to_text()


def test_parse_metric():
    assert parse_metric("ndcg@100") == ("ndcg", 100)
    with pytest.raises(ValueError):
        parse_metric("map@10")
