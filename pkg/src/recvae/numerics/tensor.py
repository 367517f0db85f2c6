"""Define-by-run reverse-mode autodiff over dense numpy arrays.

A :class:`Tensor` owns a numpy array, an optional gradient and the closure
that pushes its gradient to its parents. Graphs are built as operations run
and consumed by :meth:`Tensor.backward`.
"""
from __future__ import annotations

import math

import numpy as np

LOG_2PI = math.log(2.0 * math.pi)


class ShapeError(ValueError):
    pass


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")

    def __init__(self, data, requires_grad=False, dtype=None, name=None,
                 _parents=(), _backward=None):
        if isinstance(data, Tensor):
            data = data.data
        arr = np.asarray(data, dtype=dtype)
        if arr.dtype.kind != "f":
            arr = arr.astype(np.float64)
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward = _backward
        self.name = name

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad})"

    @property
    def shape(self):
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def T(self):
        return transpose(self)

    def numpy(self):
        return self.data

    def item(self):
        return self.data.item()

    def detach(self):
        return Tensor(self.data)

    def zero_grad(self):
        self.grad = None

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __neg__(self):
        return mul(self, -1.0)

    def __truediv__(self, other):
        if isinstance(other, Tensor):
            return mul(self, reciprocal(other))
        return mul(self, 1.0 / np.asarray(other, dtype=self.dtype))

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def sum(self, axis=None):
        return tsum(self, axis)

    def mean(self, axis=None):
        return mean(self, axis)

    def backward(self):
        """Accumulate d(self)/d(leaf) into ``.grad`` of every reachable tensor."""
        if self.data.size != 1:
            raise ValueError(f"backward() needs a scalar loss, got shape {self.shape}")
        order = _topological_order(self)
        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node._backward is not None and node.grad is not None:
                node._backward(node.grad)


def _topological_order(root):
    order, seen = [], set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def as_tensor(x, dtype=None):
    if isinstance(x, Tensor):
        return x
    return Tensor(x, dtype=dtype)


def _accumulate(t, g):
    if not t.requires_grad:
        return
    if g.shape != t.shape:
        g = _unbroadcast(g, t.shape)
    if t.grad is None:
        t.grad = np.array(g, dtype=t.dtype, copy=True)
    else:
        t.grad += g


def _unbroadcast(g, shape):
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _result(data, parents, backward):
    parents = tuple(p for p in parents if p.requires_grad)
    if not parents:
        return Tensor(data)
    return Tensor(data, requires_grad=True, _parents=parents, _backward=backward)


def _pair(a, b):
    if isinstance(a, Tensor):
        return a, as_tensor(b, dtype=a.dtype)
    b = as_tensor(b)
    return as_tensor(a, dtype=b.dtype), b


def add(a, b):
    a, b = _pair(a, b)

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, g)

    return _result(a.data + b.data, (a, b), backward)


def sub(a, b):
    a, b = _pair(a, b)

    def backward(g):
        _accumulate(a, g)
        _accumulate(b, -g)

    return _result(a.data - b.data, (a, b), backward)


def mul(a, b):
    a, b = _pair(a, b)

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g * b.data)
        if b.requires_grad:
            _accumulate(b, g * a.data)

    return _result(a.data * b.data, (a, b), backward)


def reciprocal(a):
    out = 1.0 / a.data

    def backward(g):
        _accumulate(a, -g * out * out)

    return _result(out, (a,), backward)


def square(a):
    def backward(g):
        _accumulate(a, 2.0 * g * a.data)

    return _result(a.data * a.data, (a,), backward)


def exp(a):
    out = np.exp(a.data)

    def backward(g):
        _accumulate(a, g * out)

    return _result(out, (a,), backward)


def log(a):
    def backward(g):
        _accumulate(a, g / a.data)

    return _result(np.log(a.data), (a,), backward)


def tanh(a):
    out = np.tanh(a.data)

    def backward(g):
        _accumulate(a, g * (1.0 - out * out))

    return _result(out, (a,), backward)


def sigmoid_array(x):
    # tanh form avoids overflow in exp for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def swish(a):
    """Elementwise ``x * sigmoid(x)``."""
    a = as_tensor(a)
    s = sigmoid_array(a.data)

    def backward(g):
        _accumulate(a, g * (s + a.data * s * (1.0 - s)))

    return _result(a.data * s, (a,), backward)


def matmul(a, b):
    a, b = _pair(a, b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul expects 2-d operands, got {a.shape} and {b.shape}")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} @ {b.shape}")

    def backward(g):
        if a.requires_grad:
            _accumulate(a, g @ b.data.T)
        if b.requires_grad:
            _accumulate(b, a.data.T @ g)

    return _result(a.data @ b.data, (a, b), backward)


def transpose(a):
    def backward(g):
        _accumulate(a, g.T)

    return _result(a.data.T, (a,), backward)


def tsum(a, axis=None):
    a = as_tensor(a)

    def backward(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        _accumulate(a, np.broadcast_to(g, a.shape))

    return _result(np.asarray(a.data.sum(axis=axis)), (a,), backward)


def mean(a, axis=None):
    a = as_tensor(a)
    count = a.data.size if axis is None else a.shape[axis]
    return tsum(a, axis) * (1.0 / count)


def concat(tensors, axis=-1):
    tensors = [as_tensor(t) for t in tensors]
    axis = axis % tensors[0].ndim
    bounds = np.cumsum([0] + [t.shape[axis] for t in tensors])

    def backward(g):
        for t, lo, hi in zip(tensors, bounds[:-1], bounds[1:]):
            if t.requires_grad:
                index = [slice(None)] * g.ndim
                index[axis] = slice(lo, hi)
                _accumulate(t, g[tuple(index)])

    return _result(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def layer_norm(x, gain, shift, eps=1e-5):
    """Normalize each row of ``x`` to zero mean, unit variance, then ``* gain + shift``."""
    x = as_tensor(x)
    gain, shift = as_tensor(gain, dtype=x.dtype), as_tensor(shift, dtype=x.dtype)
    if gain.shape != x.shape[-1:] or shift.shape != x.shape[-1:]:
        raise ShapeError(f"gain/shift must have shape {x.shape[-1:]}, got {gain.shape}, {shift.shape}")
    mu = x.data.mean(axis=-1, keepdims=True)
    centered = x.data - mu
    inv_std = 1.0 / np.sqrt((centered * centered).mean(axis=-1, keepdims=True) + eps)
    xhat = centered * inv_std

    def backward(g):
        _accumulate(gain, (g * xhat).reshape(-1, xhat.shape[-1]).sum(axis=0))
        _accumulate(shift, g.reshape(-1, g.shape[-1]).sum(axis=0))
        if x.requires_grad:
            gx = g * gain.data
            dx = inv_std * (gx - gx.mean(axis=-1, keepdims=True)
                            - xhat * (gx * xhat).mean(axis=-1, keepdims=True))
            _accumulate(x, dx)

    return _result(xhat * gain.data + shift.data, (x, gain, shift), backward)


def log_softmax_array(x):
    shifted = x - x.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def log_softmax(logits):
    """Row-wise log-probabilities with max subtraction."""
    logits = as_tensor(logits)
    out = log_softmax_array(logits.data)

    def backward(g):
        _accumulate(logits, g - np.exp(out) * g.sum(axis=-1, keepdims=True))

    return _result(out, (logits,), backward)


def logsumexp(tensors, log_weights=None):
    """``log(sum_k w_k exp(t_k))`` elementwise across same-shaped tensors."""
    tensors = [as_tensor(t) for t in tensors]
    stacked = np.stack([t.data for t in tensors])
    if log_weights is not None:
        lw = np.asarray(log_weights, dtype=stacked.dtype)
        stacked = stacked + lw.reshape((-1,) + (1,) * (stacked.ndim - 1))
    m = stacked.max(axis=0)
    safe_m = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(stacked - safe_m)
    total = e.sum(axis=0)
    out = safe_m + np.log(total)

    def backward(g):
        resp = e / total
        for k, t in enumerate(tensors):
            _accumulate(t, g * resp[k])

    return _result(out, tensors, backward)


def gaussian_log_density(z, mu, logvar):
    """Diagonal Gaussian log-density summed over the last axis."""
    z = as_tensor(z)
    mu, logvar = as_tensor(mu, dtype=z.dtype), as_tensor(logvar, dtype=z.dtype)
    diff = z - mu
    return tsum(square(diff) * exp(-logvar) + logvar + LOG_2PI, axis=-1) * -0.5
