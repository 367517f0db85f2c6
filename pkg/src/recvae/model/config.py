"""Model hyperparameters and the composite-prior configuration."""
import math
from dataclasses import asdict, dataclass, field

import numpy as np

DEFAULT_PRIOR_WEIGHTS = (3 / 20, 3 / 4, 1 / 10)


@dataclass
class ModelConfig:
    """Network shape, noising and KL weighting.

    ``architecture`` is ``"dense"`` (densely connected swish + layer-norm
    blocks) or ``"plain"`` (one tanh hidden layer). ``prior`` is
    ``"composite"`` or ``"standard"``; ``beta_mode`` is ``"rescaled"``
    (``gamma * n_u``) or ``"fixed"`` (``fixed_beta``).
    """

    latent_dim: int = 200
    hidden_dim: int = 600
    n_layers: int = 5
    architecture: str = "dense"
    gamma: float = 0.005
    noise_keep: float = 0.5
    rescale_noise: bool = True
    prior: str = "composite"
    prior_weights: tuple = DEFAULT_PRIOR_WEIGHTS
    wide_logvar: float = 10.0
    beta_mode: str = "rescaled"
    fixed_beta: float = 0.2
    ln_eps: float = 1e-5

    def __post_init__(self):
        self.prior_weights = tuple(float(w) for w in self.prior_weights)
        self.validate()

    def validate(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if not 0.0 < self.noise_keep <= 1.0:
            raise ValueError(f"noise_keep must lie in (0, 1], got {self.noise_keep}")
        if min(self.latent_dim, self.hidden_dim, self.n_layers) < 1:
            raise ValueError("latent_dim, hidden_dim and n_layers must be positive")
        if self.architecture not in ("dense", "plain"):
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.prior not in ("composite", "standard"):
            raise ValueError(f"unknown prior {self.prior!r}")
        if self.beta_mode not in ("rescaled", "fixed"):
            raise ValueError(f"unknown beta_mode {self.beta_mode!r}")
        if self.fixed_beta < 0:
            raise ValueError("fixed_beta must be non-negative")
        check_prior_weights(self.prior_weights)

    def to_dict(self):
        d = asdict(self)
        d["prior_weights"] = list(self.prior_weights)
        return d

    @classmethod
    def from_dict(cls, d):
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)


def check_prior_weights(weights):
    if len(weights) != 3 or min(weights) < 0 or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError(f"prior weights must be 3 non-negative numbers summing to 1, got {weights}")


def _frozen(params):
    out = {}
    for name, value in params.items():
        arr = np.array(value, copy=True)
        arr.setflags(write=False)
        out[name] = arr
    return out


@dataclass(frozen=True)
class CompositePriorConfig:
    """Mixture ``w0 N(0, I) + w1 q_old(z | x) + w2 N(0, exp(wide_logvar) I)``.

    ``snapshot`` holds read-only copies of the encoder parameters the
    old-posterior component is evaluated with.
    """

    weights: tuple = DEFAULT_PRIOR_WEIGHTS
    wide_logvar: float = 10.0
    snapshot: dict = field(default_factory=dict)

    def __post_init__(self):
        check_prior_weights(self.weights)
        if self.weights[1] > 0 and not self.snapshot:
            raise ValueError("old-posterior weight > 0 needs an encoder snapshot")

    @classmethod
    def from_encoder(cls, encoder, weights=DEFAULT_PRIOR_WEIGHTS, wide_logvar=10.0):
        return cls(tuple(weights), wide_logvar, _frozen(encoder))

    @property
    def log_weights(self):
        return [math.log(w) if w > 0 else -math.inf for w in self.weights]
