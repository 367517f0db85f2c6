"""Dense tensors, reverse-mode autodiff, layers and Adam."""
from .adam import Adam, AdamState, adam_step
from .gradcheck import check_gradients, numerical_gradient, relative_error
from .tensor import (
    LOG_2PI,
    ShapeError,
    Tensor,
    as_tensor,
    concat,
    exp,
    gaussian_log_density,
    layer_norm,
    log,
    log_softmax,
    log_softmax_array,
    logsumexp,
    matmul,
    mean,
    square,
    swish,
    tanh,
    transpose,
    tsum,
)

__all__ = [
    "Adam", "AdamState", "adam_step", "check_gradients", "numerical_gradient",
    "relative_error", "LOG_2PI", "ShapeError", "Tensor", "as_tensor", "concat", "exp",
    "gaussian_log_density", "layer_norm", "log", "log_softmax", "log_softmax_array",
    "logsumexp", "matmul", "mean", "square", "swish", "tanh", "transpose", "tsum",
]
