"""Adam with bias correction, over named numpy parameter arrays."""
from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: np.ndarray = None
    v: np.ndarray = None


def adam_step(param, grad, state):
    """Update ``param`` in place with one Adam step; returns ``(param, state)``."""
    if grad.shape != param.shape:
        raise ValueError(f"gradient shape {grad.shape} does not match parameter {param.shape}")
    if state.m is None:
        state.m = np.zeros_like(param)
        state.v = np.zeros_like(param)
    elif state.m.shape != param.shape:
        raise ValueError(f"Adam state shape {state.m.shape} does not match parameter {param.shape}")
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    state.m *= b1
    state.m += (1.0 - b1) * grad
    state.v *= b2
    state.v += (1.0 - b2) * (grad * grad)
    m_hat = state.m / (1.0 - b1 ** state.step)
    v_hat = state.v / (1.0 - b2 ** state.step)
    param -= (state.lr * m_hat / (np.sqrt(v_hat) + state.eps)).astype(param.dtype, copy=False)
    return param, state


@dataclass
class Adam:
    """One :class:`AdamState` per named parameter of a group."""

    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    states: dict = field(default_factory=dict)

    def step(self, params, grads):
        for name, grad in grads.items():
            state = self.states.get(name)
            if state is None:
                state = self.states[name] = AdamState(self.lr, self.beta1, self.beta2, self.eps)
            adam_step(params[name], grad, state)
