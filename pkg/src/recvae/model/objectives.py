"""Likelihood, prior and single-sample ELBO terms.

All functions work on batches: ``x`` is ``(B, |I|)`` and per-user results
are ``(B,)`` tensors. Gradients flow only into parameters passed as leaves
with ``requires_grad``; the prior snapshot is always constant.
"""
from dataclasses import dataclass

import numpy as np

from ..numerics import Tensor, gaussian_log_density, logsumexp, tsum
from .network import decode, encode, item_logits, reparameterize


def multinomial_log_likelihood(x, log_probs):
    """``sum_i x_i log p_i`` per row (normalizing constant dropped)."""
    log_probs = log_probs if isinstance(log_probs, Tensor) else Tensor(log_probs)
    x = Tensor(np.asarray(x, dtype=log_probs.dtype))
    if x.shape != log_probs.shape:
        raise ValueError(f"feedback shape {x.shape} does not match {log_probs.shape}")
    return tsum(x * log_probs, axis=-1)


def standard_normal_log_density(z):
    return gaussian_log_density(z, 0.0, 0.0)


def composite_prior_log_density(z, x, prior, cfg):
    """Log-density of the mixture prior at ``z``; the old posterior sees clean ``x``."""
    components, log_weights = [], []
    for w, lw, kind in zip(prior.weights, prior.log_weights, ("standard", "old", "wide")):
        if w == 0:
            continue
        if kind == "standard":
            comp = standard_normal_log_density(z)
        elif kind == "old":
            mu_old, logvar_old = encode(prior.snapshot, x, cfg)
            comp = gaussian_log_density(z, mu_old.data, logvar_old.data)
        else:
            comp = gaussian_log_density(z, 0.0, prior.wide_logvar)
        components.append(comp)
        log_weights.append(lw)
    return logsumexp(components, log_weights)


def beta_prime(x, gamma):
    """Per-user KL weight ``gamma * (number of positives)`` on the clean row."""
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return gamma * np.asarray(x).sum(axis=-1)


@dataclass
class ElboTerms:
    objective: Tensor
    reconstruction: Tensor
    kl: Tensor
    beta: np.ndarray
    z: Tensor


def kl_weight(x, cfg):
    if cfg.beta_mode == "rescaled":
        return beta_prime(x, cfg.gamma)
    return np.full(np.asarray(x).shape[0], cfg.fixed_beta)


def elbo_estimate(x, x_noised, encoder, decoder, cfg, eps, prior=None):
    """Single-sample lower bound ``log p(x|z) - beta (log q(z|x~) - log p(z))``.

    ``z`` is drawn from the posterior of ``x_noised`` with the supplied
    standard-normal ``eps``; the reconstruction always targets ``x``.
    ``prior=None`` means the standard normal prior.
    """
    x = np.asarray(x)
    mu, logvar = encode(encoder, x_noised, cfg)
    z = reparameterize(mu, logvar, eps)
    recon = multinomial_log_likelihood(x, decode(z, decoder))
    log_q = gaussian_log_density(z, mu, logvar)
    if prior is None:
        log_p = standard_normal_log_density(z)
    else:
        log_p = composite_prior_log_density(z, x, prior, cfg)
    kl = log_q - log_p
    beta = kl_weight(x, cfg).astype(recon.dtype)
    return ElboTerms(recon - kl * beta, recon, kl, beta, z)


def decoder_objective(x, encoder, decoder, cfg, eps, x_input=None):
    """``log p(x|z)`` with ``z`` sampled from the posterior of ``x_input`` (default: clean ``x``)."""
    x = np.asarray(x)
    mu, logvar = encode(encoder, x if x_input is None else x_input, cfg)
    z = reparameterize(mu, logvar, eps)
    return multinomial_log_likelihood(x, decode(z, decoder))


def analytic_standard_kl(mu, logvar):
    """Closed-form KL(N(mu, diag exp(logvar)) || N(0, I)) per row."""
    mu, logvar = np.asarray(mu, dtype=np.float64), np.asarray(logvar, dtype=np.float64)
    return 0.5 * (np.exp(logvar) + mu * mu - 1.0 - logvar).sum(axis=-1)


def predict_scores(x, encoder, decoder, cfg):
    """Item scores ``W mu(x) + b`` with items already in ``x`` set to -inf."""
    x = np.atleast_2d(np.asarray(x))
    mu, _ = encode(encoder, x, cfg)
    scores = np.array(item_logits(mu, decoder).data, copy=True)
    scores[x > 0] = -np.inf
    return scores
