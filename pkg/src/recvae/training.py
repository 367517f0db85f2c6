"""Alternating encoder/decoder training with prior-snapshot refresh."""
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from .errors import NumericalError
from .evaluation import mean_ndcg
from .model import (
    CompositePriorConfig,
    ModelConfig,
    RecVAE,
    as_leaves,
    corrupt,
    decoder_objective,
    elbo_estimate,
)
from .numerics import Adam

logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    """Outer epochs, phase lengths and optimizer settings.

    ``decoder_steps=None`` sizes the decoder phase so each training user is
    visited once; the encoder phase runs ``enc_dec_ratio`` times as many
    steps. With ``alternating=False`` each epoch runs ``decoder_steps``
    joint updates of both parameter groups instead.
    """

    model: ModelConfig = field(default_factory=ModelConfig)
    epochs: int = 50
    batch_size: int = 500
    lr: float = 5e-4
    seed: int = 0
    enc_dec_ratio: int = 3
    decoder_steps: int = None
    alternating: bool = True
    decoder_denoising: bool = False
    eval_batch_size: int = 1000

    def __post_init__(self):
        if isinstance(self.model, dict):
            self.model = ModelConfig.from_dict(self.model)
        for name in ("epochs", "batch_size", "enc_dec_ratio", "eval_batch_size"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.decoder_steps is not None and self.decoder_steps < 1:
            raise ValueError("decoder_steps must be positive")
        if not self.lr > 0:
            raise ValueError("lr must be > 0")

    def phase_steps(self, n_train):
        dec = self.decoder_steps or math.ceil(n_train / self.batch_size)
        return self.enc_dec_ratio * dec, dec

    def to_dict(self):
        d = asdict(self)
        d["model"] = self.model.to_dict()
        return d


@dataclass
class EpochRecord:
    epoch: int
    objective: float
    val_ndcg: float
    seconds: float

    def line(self):
        return f"{self.epoch}\t{self.objective:.6f}\t{self.val_ndcg:.6f}\t{self.seconds:.2f}"


@dataclass
class TrainState:
    model: RecVAE
    snapshot: dict
    encoder_opt: Adam
    decoder_opt: Adam
    epoch: int = 0
    best_ndcg: float = -math.inf
    best_epoch: int = 0
    best_model: RecVAE = None
    best_checkpoint: Path = None
    history: list = field(default_factory=list)
    encoder_updates: int = 0
    decoder_updates: int = 0


def phase_batches(n, batch_size, steps, rng):
    """``steps`` index batches: consecutive slices of a fresh shuffle, remainders kept."""
    perm, pos = rng.permutation(n), 0
    for _ in range(steps):
        if pos >= n:
            perm, pos = rng.permutation(n), 0
        yield perm[pos:pos + batch_size]
        pos += batch_size


def snapshot_encoder(encoder):
    return {k: v.copy() for k, v in encoder.items()}


def validate(model, split, k=100, batch_size=1000):
    """Mean NDCG@k over usable validation users."""
    return mean_ndcg(model.predict_scores, model.n_items, split.validation, k, batch_size)


class _Stepper:
    def __init__(self, cfg, state, rngs):
        self.cfg = cfg
        self.mcfg = cfg.model
        self.state = state
        self.noise_rng, self.eps_rng = rngs

    def _eps(self, n, dtype):
        return self.eps_rng.standard_normal((n, self.mcfg.latent_dim)).astype(dtype)

    def _noised(self, x):
        return corrupt(x, self.mcfg.noise_keep, self.noise_rng, self.mcfg.rescale_noise)

    def prior(self):
        if self.mcfg.prior != "composite":
            return None
        return CompositePriorConfig.from_encoder(self.state.snapshot, self.mcfg.prior_weights,
                                                 self.mcfg.wide_logvar)

    def encoder_step(self, x, prior):
        model = self.state.model
        enc, dec = as_leaves(model.encoder, True), as_leaves(model.decoder)
        terms = elbo_estimate(x, self._noised(x), enc, dec, self.mcfg, self._eps(len(x), x.dtype), prior)
        objective = terms.objective.mean()
        (-objective).backward()
        self._apply(self.state.encoder_opt, model.encoder, enc)
        self.state.encoder_updates += 1
        return float(objective.data)

    def decoder_step(self, x):
        model = self.state.model
        enc, dec = as_leaves(model.encoder), as_leaves(model.decoder, True)
        x_in = self._noised(x) if self.cfg.decoder_denoising else x
        objective = decoder_objective(x, enc, dec, self.mcfg, self._eps(len(x), x.dtype), x_in).mean()
        (-objective).backward()
        self._apply(self.state.decoder_opt, model.decoder, dec)
        self.state.decoder_updates += 1
        return float(objective.data)

    def joint_step(self, x, prior):
        model = self.state.model
        eps = self._eps(len(x), x.dtype)
        x_noised = self._noised(x)
        enc = as_leaves(model.encoder, True)
        if self.cfg.decoder_denoising:
            dec = as_leaves(model.decoder, True)
            objective = elbo_estimate(x, x_noised, enc, dec, self.mcfg, eps, prior).objective.mean()
            loss = -objective
        else:
            # encoder follows the noised bound; decoder sees the clean-input reconstruction
            dec = as_leaves(model.decoder, True)
            objective = elbo_estimate(x, x_noised, enc, as_leaves(model.decoder), self.mcfg, eps,
                                      prior).objective.mean()
            recon = decoder_objective(x, as_leaves(model.encoder), dec, self.mcfg, eps).mean()
            loss = -(objective + recon)
        loss.backward()
        self._apply(self.state.encoder_opt, model.encoder, enc)
        self._apply(self.state.decoder_opt, model.decoder, dec)
        self.state.encoder_updates += 1
        self.state.decoder_updates += 1
        return float(objective.data)

    @staticmethod
    def _apply(opt, params, leaves):
        grads = {k: leaves[k].grad for k in params if leaves[k].grad is not None}
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise FloatingPointError(f"non-finite gradient for {name}")
        opt.step(params, grads)


def train(matrix, split, cfg, out_dir=None, init=None, verbose=True, log_path=None):
    """Run ``cfg.epochs`` epochs of alternating (or joint) updates.

    After every epoch the validation NDCG@100 is computed; the best model is
    kept in memory and, with ``out_dir``, written to ``out_dir/model.rvae``.
    """
    mcfg = cfg.model
    init_ss, batch_ss, noise_ss, eps_ss = np.random.SeedSequence(cfg.seed).spawn(4)
    if init is None:
        model = RecVAE.initialize(mcfg, matrix.n_items, np.random.default_rng(init_ss))
    else:
        model = RecVAE(mcfg, {k: np.array(v, dtype=np.float32) for k, v in init.encoder.items()},
                       {k: np.array(v, dtype=np.float32) for k, v in init.decoder.items()})
    state = TrainState(model, snapshot_encoder(model.encoder), Adam(cfg.lr), Adam(cfg.lr))
    stepper = _Stepper(cfg, state, (np.random.default_rng(noise_ss), np.random.default_rng(eps_ss)))
    batch_rng = np.random.default_rng(batch_ss)

    train_ptr, train_idx = matrix.subset(split.train_users)
    n_train = len(split.train_users)
    enc_steps, dec_steps = cfg.phase_steps(n_train)

    def batch(rows):
        return _backend.densify_rows(train_ptr, train_idx, rows, matrix.n_items, np.float32)

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        log_path = log_path or out_dir / "train.log"
    log_file = open(log_path, "w") if log_path else None
    try:
        for epoch in range(1, cfg.epochs + 1):
            started = time.perf_counter()
            phase, step = "encoder", 0
            try:
                prior = stepper.prior()
                values = []
                if cfg.alternating:
                    for step, rows in enumerate(phase_batches(n_train, cfg.batch_size, enc_steps, batch_rng)):
                        values.append(stepper.encoder_step(batch(rows), prior))
                        _check_finite(values[-1])
                    state.snapshot = snapshot_encoder(model.encoder)
                    phase = "decoder"
                    for step, rows in enumerate(phase_batches(n_train, cfg.batch_size, dec_steps, batch_rng)):
                        _check_finite(stepper.decoder_step(batch(rows)))
                else:
                    phase = "joint"
                    for step, rows in enumerate(phase_batches(n_train, cfg.batch_size, dec_steps, batch_rng)):
                        values.append(stepper.joint_step(batch(rows), prior))
                        _check_finite(values[-1])
                    state.snapshot = snapshot_encoder(model.encoder)
            except FloatingPointError as exc:
                raise NumericalError(
                    f"{exc} at epoch {epoch}, {phase} step {step + 1} (seed {cfg.seed})") from None
            state.epoch = epoch
            score = validate(model, split, batch_size=cfg.eval_batch_size)
            if not math.isfinite(score):
                raise NumericalError(f"non-finite validation NDCG at epoch {epoch} (seed {cfg.seed})")
            record = EpochRecord(epoch, float(np.mean(values)), score, time.perf_counter() - started)
            state.history.append(record)
            if score > state.best_ndcg:
                state.best_ndcg, state.best_epoch = score, epoch
                state.best_model = model.copy()
                if out_dir is not None:
                    state.best_checkpoint = out_dir / "model.rvae"
                    state.best_model.save(state.best_checkpoint, _checkpoint_extra(cfg, state))
            line = record.line()
            if verbose:
                print(line, file=sys.stdout, flush=True)
            if log_file:
                log_file.write(line + "\n")
                log_file.flush()
    finally:
        if log_file:
            log_file.close()
    return state


def _check_finite(value):
    if not math.isfinite(value):
        raise FloatingPointError(f"non-finite objective {value}")


def _checkpoint_extra(cfg, state):
    return {"train": cfg.to_dict(), "best_epoch": state.best_epoch,
            "val_ndcg@100": float(state.best_ndcg)}
