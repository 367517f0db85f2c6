import os

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recvae import _backend
from recvae.evaluation import ndcg_at_k, recall_at_k

backends = pytest.mark.parametrize("backend", sorted(_backend.BACKENDS))


def _csr(rows):
    indptr = np.cumsum([0] + [len(r) for r in rows])
    return indptr, np.concatenate([np.asarray(r, dtype=np.int64) for r in rows] + [np.zeros(0, np.int64)])


@pytest.mark.skipif(bool(os.environ.get("RECVAE_PURE_PYTHON")), reason="fallback forced")
def test_compiled_backend_is_built():
    assert "cython" in _backend.BACKENDS, "compiled kernels missing; reinstall the package"


@backends
def test_densify_and_exclude(backend):
    indptr, indices = _csr([[0, 3], [], [1, 2, 4]])
    dense = _backend.densify_rows(indptr, indices, [2, 0], 5, np.float64, backend)
    np.testing.assert_array_equal(dense, [[0, 1, 1, 0, 1], [1, 0, 0, 1, 0]])
    scores = np.ones((3, 5))
    _backend.exclude_items(scores, indptr, indices, backend)
    assert np.isneginf(scores).sum() == 5 and np.isneginf(scores[0, 3])


@backends
def test_top_k_ties_and_nan(backend):
    scores = np.array([[1.0, 3.0, 3.0, np.nan, 2.0]])
    np.testing.assert_array_equal(_backend.top_k(scores, 4, backend), [[1, 2, 4, 0]])


@backends
def test_ranking_metrics_match_python_definitions(backend):
    rng = np.random.default_rng(0)
    ranked = np.stack([rng.permutation(20)[:10] for _ in range(30)])
    holds = [rng.choice(20, rng.integers(1, 8), replace=False) for _ in range(30)]
    indptr, indices = _csr(holds)
    recall, ndcg = _backend.ranking_metrics(ranked, indptr, indices, [1, 5, 10], 20, backend)
    for r in range(30):
        for j, k in enumerate((1, 5, 10)):
            assert recall[r, j] == pytest.approx(recall_at_k(ranked[r], set(holds[r]), k), abs=1e-12)
            assert ndcg[r, j] == pytest.approx(ndcg_at_k(ranked[r], set(holds[r]), k), abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(1, 40), st.integers(1, 45), st.integers(0, 2 ** 31),
       st.sampled_from([np.float32, np.float64]))
def test_backends_agree(n_rows, n_items, k, seed, dtype):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 5, (n_rows, n_items)).astype(dtype)
    rows = [rng.choice(n_items, rng.integers(0, n_items + 1), replace=False) for _ in range(n_rows)]
    indptr, indices = _csr(rows)
    results = {}
    for name in _backend.BACKENDS:
        s = scores.copy()
        _backend.exclude_items(s, indptr, indices, name)
        ranked = _backend.top_k(s, k, name)
        kk = [min(k, n_items)]
        results[name] = (s, ranked, *_backend.ranking_metrics(ranked, indptr, indices, kk, n_items, name),
                         _backend.densify_rows(indptr, indices, np.arange(n_rows), n_items, dtype, name))
    first, *rest = results.values()
    for other in rest:
        for a, b in zip(first, other):
            np.testing.assert_array_equal(a, b)


def test_ranking_metrics_reject_bad_k():
    with pytest.raises(ValueError):
        _backend.ranking_metrics(np.zeros((1, 3), np.int64), [0, 1], [0], [4], 3)
