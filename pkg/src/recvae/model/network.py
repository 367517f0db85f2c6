"""Inference network, linear decoder and input noising."""
import numpy as np

from ..numerics import Tensor, as_tensor, concat, exp, layer_norm, log_softmax, swish, tanh
from ..numerics.tensor import ShapeError


def _xavier(rng, fan_in, fan_out, dtype):
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, (fan_in, fan_out)).astype(dtype)


def init_encoder(cfg, n_items, rng, dtype=np.float32):
    params = {}

    def dense(name, fan_in, fan_out):
        params[f"{name}.weight"] = _xavier(rng, fan_in, fan_out, dtype)
        params[f"{name}.bias"] = np.zeros(fan_out, dtype=dtype)

    h = cfg.hidden_dim
    if cfg.architecture == "dense":
        for layer in range(cfg.n_layers):
            dense(f"enc.fc{layer}", n_items if layer == 0 else layer * h, h)
            params[f"enc.ln{layer}.gain"] = np.ones(h, dtype=dtype)
            params[f"enc.ln{layer}.shift"] = np.zeros(h, dtype=dtype)
    else:
        dense("enc.fc0", n_items, h)
    dense("enc.mu", h, cfg.latent_dim)
    dense("enc.logvar", h, cfg.latent_dim)
    return params


def init_decoder(cfg, n_items, rng, dtype=np.float32):
    # item embeddings W are stored |I| x latent
    weight = _xavier(rng, cfg.latent_dim, n_items, dtype).T.copy()
    return {"dec.weight": weight, "dec.bias": np.zeros(n_items, dtype=dtype)}


def as_leaves(params, trainable=False):
    return {k: Tensor(v, requires_grad=trainable) for k, v in params.items()}


def _leaf(params, name):
    value = params[name]
    return value if isinstance(value, Tensor) else Tensor(value)


def noise_mask(shape, keep, rng, rescale=True, dtype=np.float32):
    """Bernoulli(keep) mask, scaled by ``1 / keep`` when ``rescale``."""
    if not 0.0 < keep <= 1.0:
        raise ValueError(f"keep probability must lie in (0, 1], got {keep}")
    if keep == 1.0:
        return np.ones(shape, dtype=dtype)
    mask = (rng.random(shape) < keep).astype(dtype)
    if rescale:
        mask /= keep
    return mask


def corrupt(x, keep, rng, rescale=True):
    """Drop entries of ``x`` independently with probability ``1 - keep``."""
    x = np.asarray(x)
    return x * noise_mask(x.shape, keep, rng, rescale, x.dtype)


def _normalize_rows(x):
    norms = np.sqrt((x * x).sum(axis=-1, keepdims=True))
    return x / np.maximum(norms, np.finfo(x.dtype).tiny)


def encode(params, x, cfg):
    """Posterior mean and log-variance for each row of the (possibly noised) input."""
    x = x.data if isinstance(x, Tensor) else np.asarray(x)
    squeeze = x.ndim == 1
    x = np.atleast_2d(x)
    w0 = _leaf(params, "enc.fc0.weight")
    if x.shape[1] != w0.shape[0]:
        raise ShapeError(f"input has {x.shape[1]} items, encoder expects {w0.shape[0]}")
    h_in = Tensor(_normalize_rows(x).astype(w0.dtype, copy=False))
    if cfg.architecture == "dense":
        hidden = []
        for layer in range(cfg.n_layers):
            inp = h_in if layer == 0 else (hidden[0] if layer == 1 else concat(hidden))
            a = inp @ _leaf(params, f"enc.fc{layer}.weight") + _leaf(params, f"enc.fc{layer}.bias")
            hidden.append(layer_norm(swish(a), _leaf(params, f"enc.ln{layer}.gain"),
                                     _leaf(params, f"enc.ln{layer}.shift"), cfg.ln_eps))
        h = hidden[-1]
    else:
        h = tanh(h_in @ w0 + _leaf(params, "enc.fc0.bias"))
    mu = h @ _leaf(params, "enc.mu.weight") + _leaf(params, "enc.mu.bias")
    logvar = h @ _leaf(params, "enc.logvar.weight") + _leaf(params, "enc.logvar.bias")
    if squeeze:
        return Tensor(mu.data[0]), Tensor(logvar.data[0])
    return mu, logvar


def item_logits(z, params):
    z = as_tensor(z)
    weight = _leaf(params, "dec.weight")
    if z.shape[-1] != weight.shape[1]:
        raise ShapeError(f"latent has size {z.shape[-1]}, decoder expects {weight.shape[1]}")
    if z.ndim == 1:
        return Tensor(weight.data @ z.data + _leaf(params, "dec.bias").data)
    return z @ weight.T + _leaf(params, "dec.bias")


def decode(z, params):
    """Item log-probabilities ``log_softmax(W z + b)``."""
    return log_softmax(item_logits(z, params))


def reparameterize(mu, logvar, eps):
    """``z = mu + exp(logvar / 2) * eps``."""
    return mu + exp(logvar * 0.5) * Tensor(eps, dtype=mu.dtype)
