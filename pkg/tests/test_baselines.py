import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recvae import training
from recvae.baselines import (
    FLAGS,
    FULL,
    MULT_VAE,
    TABLE_ROWS,
    AblationConfig,
    EaseModel,
    Popularity,
    configure_ablation,
    ease_fit,
    format_table,
    parse_table,
)
from recvae.errors import CapabilityError, FormatError
from recvae.model import ModelConfig, RecVAE
from recvae.training import TrainConfig, train


def _column_oracle(X, lam):
    """Each column solved on its own with item j removed from the regressors."""
    n = X.shape[1]
    B = np.zeros((n, n))
    for j in range(n):
        others = [i for i in range(n) if i != j]
        A = X[:, others]
        B[others, j] = np.linalg.solve(A.T @ A + lam * np.eye(n - 1), A.T @ X[:, j])
    return B


def test_ease_identity_gives_zero():
    np.testing.assert_array_equal(ease_fit(np.eye(2), 1.0).B, np.zeros((2, 2)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10), st.integers(2, 8), st.floats(0.1, 50), st.integers(0, 2 ** 31))
def test_ease_matches_columnwise_oracle(n_users, n_items, lam, seed):
    X = (np.random.default_rng(seed).random((n_users, n_items)) < 0.5).astype(float)
    B = ease_fit(X, lam).B
    assert np.all(np.diag(B) == 0.0)
    np.testing.assert_allclose(B, _column_oracle(X, lam), atol=1e-9)


def test_ease_permutation_equivariance():
    rng = np.random.default_rng(0)
    X = (rng.random((30, 9)) < 0.4).astype(float)
    perm = rng.permutation(9)
    B = ease_fit(X, 5.0).B
    np.testing.assert_allclose(ease_fit(X[:, perm], 5.0).B, B[np.ix_(perm, perm)], atol=1e-12)
    np.testing.assert_array_equal(ease_fit(X, 5.0).B, B)


def test_ease_rejects_bad_input():
    with pytest.raises(ValueError):
        ease_fit(np.eye(3), 0.0)
    with pytest.raises(CapabilityError, match="5"):
        ease_fit(np.eye(6), 1.0, max_items=5)


def test_ease_save_load(tmp_path):
    model = ease_fit(np.eye(3) + np.ones((3, 3)), 2.0)
    model.save(tmp_path / "e.rvae")
    loaded = EaseModel.load(tmp_path / "e.rvae")
    np.testing.assert_allclose(loaded.B, model.B, rtol=1e-6)
    assert loaded.lam == 2.0
    with pytest.raises(FormatError):
        RecVAE.load(tmp_path / "e.rvae")


def test_popularity_ranks_by_training_counts(toy_data):
    matrix, split = toy_data
    pop = Popularity(matrix, split.train_users)
    scores = pop.predict_scores(np.zeros((1, matrix.n_items)))[0]
    counts = matrix.to_dense(split.train_users).sum(axis=0)
    np.testing.assert_array_equal(scores, counts)


def test_ablation_codes():
    assert MULT_VAE.code == "00000" and FULL.code == "11111"
    assert len(TABLE_ROWS) == 11 and TABLE_ROWS[0] == MULT_VAE and TABLE_ROWS[-1] == FULL
    assert AblationConfig.from_code("10100").as_dict()["beta_rescaling"]
    with pytest.raises(ValueError):
        AblationConfig.from_code("1012")


def test_configure_ablation_mapping():
    base = TrainConfig(ModelConfig(latent_dim=4, hidden_dim=8))
    mult = configure_ablation(MULT_VAE, base)
    assert (mult.model.architecture, mult.model.prior, mult.model.beta_mode) == ("plain", "standard", "fixed")
    assert not mult.alternating and mult.decoder_denoising
    full = configure_ablation(FULL, base)
    assert (full.model.architecture, full.model.prior, full.model.beta_mode) == ("dense", "composite", "rescaled")
    assert full.alternating and not full.decoder_denoising
    assert full.model.latent_dim == 4


def test_every_flag_subset_trains(toy_data):
    matrix, split = toy_data
    base = TrainConfig(ModelConfig(latent_dim=4, hidden_dim=8, n_layers=2), epochs=1, batch_size=128,
                       decoder_steps=1, enc_dec_ratio=1)
    for bits in itertools.product([False, True], repeat=len(FLAGS)):
        state = train(matrix, split, configure_ablation(AblationConfig(*bits), base), verbose=False)
        assert np.isfinite(state.best_ndcg)


def test_snapshot_is_inert_without_composite_prior(toy_data):
    matrix, split = toy_data
    cfg = configure_ablation(AblationConfig(True, False, True, True, True),
                             TrainConfig(ModelConfig(latent_dim=4, hidden_dim=8, n_layers=2)))
    x = matrix.to_dense(split.train_users[:16])
    results = []
    for snapshot in ("real", "garbage"):
        model = RecVAE.initialize(cfg.model, matrix.n_items, 0)
        snap = training.snapshot_encoder(model.encoder)
        if snapshot == "garbage":
            snap = {k: np.full_like(v, 7.0) for k, v in snap.items()}
        state = training.TrainState(model, snap, training.Adam(), training.Adam())
        stepper = training._Stepper(cfg, state, (np.random.default_rng(0), np.random.default_rng(1)))
        stepper.encoder_step(x, stepper.prior())
        results.append(model.encoder)
    assert all(np.array_equal(results[0][k], results[1][k]) for k in results[0])


def test_table_round_trip():
    results = [(row, (0.1 + i / 7, 0.01 * i)) for i, row in enumerate(TABLE_ROWS)]
    assert parse_table(format_table(results)) == results
