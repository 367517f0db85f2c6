"""The RecVAE network and its objective terms."""
from .checkpoint import load_checkpoint, save_checkpoint
from .config import CompositePriorConfig, ModelConfig
from .network import (
    as_leaves,
    corrupt,
    decode,
    encode,
    init_decoder,
    init_encoder,
    item_logits,
    noise_mask,
    reparameterize,
)
from .objectives import (
    ElboTerms,
    analytic_standard_kl,
    beta_prime,
    composite_prior_log_density,
    decoder_objective,
    elbo_estimate,
    gaussian_log_density,
    multinomial_log_likelihood,
    predict_scores,
    standard_normal_log_density,
)
from .recvae import RecVAE

__all__ = [
    "load_checkpoint", "save_checkpoint", "CompositePriorConfig", "ModelConfig", "as_leaves",
    "corrupt", "decode", "encode", "init_decoder", "init_encoder", "item_logits", "noise_mask",
    "reparameterize", "ElboTerms", "analytic_standard_kl", "beta_prime",
    "composite_prior_log_density", "decoder_objective", "elbo_estimate", "gaussian_log_density",
    "multinomial_log_likelihood", "predict_scores", "standard_normal_log_density", "RecVAE",
]
