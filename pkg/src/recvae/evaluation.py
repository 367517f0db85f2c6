"""Recall@k / NDCG@k and the held-out-user evaluation protocol."""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .data.interactions import csr_rows

DEFAULT_METRICS = ("recall@20", "recall@50", "ndcg@100")
CI_METHOD = "user-level bootstrap, 95% percentile interval half-width"


def _check(holdout, k):
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(holdout) == 0:
        raise ValueError("holdout set is empty")


def recall_at_k(ranked, holdout, k):
    """Hits in the top ``k`` divided by ``min(k, |holdout|)``."""
    holdout = set(holdout)
    _check(holdout, k)
    hits = sum(1 for item in list(ranked)[:k] if item in holdout)
    return hits / min(k, len(holdout))


def ndcg_at_k(ranked, holdout, k):
    """DCG of the top ``k`` over the ideal DCG of ``min(k, |holdout|)`` hits."""
    holdout = set(holdout)
    _check(holdout, k)
    dcg = sum(1.0 / math.log(n + 2) for n, item in enumerate(list(ranked)[:k]) if item in holdout)
    idcg = sum(1.0 / math.log(n + 2) for n in range(min(k, len(holdout))))
    return dcg / idcg


def parse_metric(name):
    kind, _, k = name.partition("@")
    if kind not in ("recall", "ndcg") or not k.isdigit():
        raise ValueError(f"unknown metric {name!r}")
    return kind, int(k)


def bootstrap_ci(values, n_boot=1000, seed=0, level=0.95):
    """Half-width of the percentile bootstrap interval of the mean."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) < 2:
        return 0.0
    rng = np.random.default_rng(seed)
    means = values[rng.integers(0, len(values), (n_boot, len(values)))].mean(axis=1)
    lo, hi = np.quantile(means, [(1 - level) / 2, (1 + level) / 2])
    return float((hi - lo) / 2)


@dataclass
class MetricSummary:
    mean: float
    ci: float
    n: int


@dataclass
class MetricsReport:
    metrics: dict
    n_unusable: int = 0
    ci_method: str = CI_METHOD
    per_user: dict = field(default_factory=dict, repr=False)

    def __getitem__(self, name):
        return self.metrics[name]

    def to_dict(self):
        out = {name: {"mean": s.mean, "ci": s.ci, "n": s.n} for name, s in self.metrics.items()}
        out["_meta"] = {"n_unusable": self.n_unusable, "ci_method": self.ci_method}
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d):
        meta = d.get("_meta", {})
        metrics = {k: MetricSummary(v["mean"], v["ci"], v["n"]) for k, v in d.items() if k != "_meta"}
        return cls(metrics, meta.get("n_unusable", 0), meta.get("ci_method", CI_METHOD))

    def to_text(self):
        width = max(len(name) for name in self.metrics)
        lines = [f"{'metric':<{width}}  {'mean':>8}  {'+/-':>8}  {'users':>6}"]
        for name, s in self.metrics.items():
            lines.append(f"{name:<{width}}  {s.mean:8.4f}  {s.ci:8.4f}  {s.n:6d}")
        lines.append(f"excluded users (holdout empty): {self.n_unusable}")
        lines.append(f"intervals: {self.ci_method}")
        return "\n".join(lines)

    def save(self, text_path, json_path):
        with open(text_path, "w") as fh:
            fh.write(self.to_text() + "\n")
        with open(json_path, "w") as fh:
            fh.write(self.to_json() + "\n")


def per_user_metrics(scorer, n_items, held, metrics=DEFAULT_METRICS, batch_size=1000, backend=None):
    """Metric values for every usable held-out user, plus the usable user positions."""
    # ranks beyond the catalogue cannot hold hits, so k is capped at n_items
    parsed = [(kind, min(k, n_items)) for kind, k in map(parse_metric, metrics)]
    ks = sorted({k for _, k in parsed})
    usable = np.flatnonzero(held.usable)
    values = {m: np.empty(len(usable)) for m in metrics}
    for start in range(0, len(usable), batch_size):
        rows = usable[start:start + batch_size]
        fold_ptr, fold_idx = csr_rows(held.fold_in_indptr, held.fold_in_indices, rows)
        x = _backend.densify_rows(fold_ptr, fold_idx, np.arange(len(rows)), n_items, np.float32, backend)
        scores = np.array(scorer(x), dtype=np.float64, order="C", copy=True)
        _backend.exclude_items(scores, fold_ptr, fold_idx, backend)
        ranked = _backend.top_k(scores, max(ks), backend)
        hold_ptr, hold_idx = csr_rows(held.holdout_indptr, held.holdout_indices, rows)
        recall, ndcg = _backend.ranking_metrics(ranked, hold_ptr, hold_idx, ks, n_items, backend)
        for name, (kind, k) in zip(metrics, parsed):
            column = (recall if kind == "recall" else ndcg)[:, ks.index(k)]
            values[name][start:start + len(rows)] = column
    return values, usable


def evaluate(scorer, n_items, split, which="test", metrics=DEFAULT_METRICS, batch_size=1000,
             n_boot=1000, seed=0, backend=None):
    """Score held-out users from their fold-in items and summarize each metric."""
    held = split.heldout(which)
    values, usable = per_user_metrics(scorer, n_items, held, metrics, batch_size, backend)
    if len(usable) == 0:
        raise ValueError(f"no usable users in the {which} set")
    summary = {m: MetricSummary(float(v.mean()), bootstrap_ci(v, n_boot, seed), len(v))
               for m, v in values.items()}
    return MetricsReport(summary, held.n_unusable, per_user=values)


def mean_ndcg(scorer, n_items, held, k=100, batch_size=1000):
    values, usable = per_user_metrics(scorer, n_items, held, (f"ndcg@{k}",), batch_size)
    if len(usable) == 0:
        raise ValueError("no usable validation users")
    return float(values[f"ndcg@{k}"].mean())
