"""RecVAE: a variational autoencoder for top-N recommendation from implicit feedback."""
from ._backend import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
