"""Adam optimizer with bias correction.

State is kept per qualified parameter name so it survives parameter
dict rebuilds; all moment math runs in float32 to match the parameter
precision (reproducibility over marginal accuracy).
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamState:
    """First/second moment estimates plus the shared step counter."""
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0


def init_adam(params):
    """Zeroed moments matching a {name: array} parameter mapping."""
    state = AdamState()
    for name, arr in params.items():
        state.m[name] = np.zeros_like(arr)
        state.v[name] = np.zeros_like(arr)
    return state


def adam_step(params, grads, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update; returns the new {name: array} map.

    m <- b1*m + (1-b1)*g;  v <- b2*v + (1-b2)*g^2
    theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
    """
    state.t += 1
    t = state.t
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    out = {}
    for name, theta in params.items():
        g = grads[name]
        if g.shape != theta.shape:
            raise ValueError(
                f"adam_step: grad shape {g.shape} != param shape "
                f"{theta.shape} for {name}")
        m = state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * g
        v = state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = m / bc1
        v_hat = v / bc2
        out[name] = (theta - lr * m_hat / (np.sqrt(v_hat) + eps)).astype(
            theta.dtype)
    return out
