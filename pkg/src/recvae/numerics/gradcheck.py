"""Central finite-difference checks for scalar functions of named arrays."""
import numpy as np

from .tensor import Tensor


def numerical_gradient(fn, arrays, name, h=1e-5):
    """d fn / d arrays[name] by central differences; ``fn`` maps arrays -> float."""
    base = arrays[name]
    grad = np.zeros_like(base, dtype=np.float64)
    flat = base.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        plus = fn(arrays)
        flat[i] = orig - h
        minus = fn(arrays)
        flat[i] = orig
        out[i] = (plus - minus) / (2.0 * h)
    return grad


def relative_error(analytic, numeric, floor=1e-10):
    """Norm-wise relative error; absolute error when both gradients vanish."""
    diff = np.linalg.norm(analytic - numeric)
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric))
    return diff if scale < floor else diff / scale


def check_gradients(build_loss, arrays, names=None, h=1e-5):
    """Compare autodiff and finite-difference gradients of ``build_loss``.

    ``build_loss`` receives a dict of Tensors (leaves marked ``requires_grad``
    for ``names``) and returns a scalar Tensor. Returns ``{name: rel_error}``.
    """
    names = list(arrays) if names is None else list(names)
    leaves = {k: Tensor(v, requires_grad=k in names) for k, v in arrays.items()}
    build_loss(leaves).backward()

    def value(arrs):
        return float(build_loss({k: Tensor(v) for k, v in arrs.items()}).data)

    errors = {}
    for name in names:
        analytic = leaves[name].grad
        if analytic is None:
            analytic = np.zeros_like(arrays[name])
        errors[name] = relative_error(analytic, numerical_gradient(value, arrays, name, h))
    return errors
