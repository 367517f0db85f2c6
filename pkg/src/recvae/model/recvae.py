"""A trained (encoder, decoder) pair with its config."""
from dataclasses import dataclass

import numpy as np

from ..errors import FormatError
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ModelConfig
from .network import init_decoder, init_encoder
from .objectives import predict_scores


@dataclass
class RecVAE:
    cfg: ModelConfig
    encoder: dict
    decoder: dict

    @classmethod
    def initialize(cls, cfg, n_items, seed=0, dtype=np.float32):
        rng = np.random.default_rng(seed)
        return cls(cfg, init_encoder(cfg, n_items, rng, dtype), init_decoder(cfg, n_items, rng, dtype))

    @property
    def n_items(self):
        return self.decoder["dec.bias"].shape[0]

    def predict_scores(self, x):
        return predict_scores(x, self.encoder, self.decoder, self.cfg)

    __call__ = predict_scores

    def copy(self):
        return RecVAE(self.cfg, {k: v.copy() for k, v in self.encoder.items()},
                      {k: v.copy() for k, v in self.decoder.items()})

    def save(self, path, extra=None):
        hyper = {"model": self.cfg.to_dict(), "n_items": int(self.n_items)}
        if extra:
            hyper.update(extra)
        save_checkpoint(path, "recvae", hyper, {**self.encoder, **self.decoder})

    @classmethod
    def load(cls, path):
        kind, hyper, tensors = load_checkpoint(path)
        if kind != "recvae":
            raise FormatError(f"checkpoint holds a {kind!r} model, expected 'recvae'")
        cfg = ModelConfig.from_dict(hyper["model"])
        enc = {k: v for k, v in tensors.items() if k.startswith("enc.")}
        dec = {k: v for k, v in tensors.items() if k.startswith("dec.")}
        return cls(cfg, enc, dec)
