from dataclasses import dataclass, field

import numpy as np

from ..core.errors import ContractViolation, NumericFault
from . import TrainConfig


@dataclass
class AdamState:
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def fresh(cls, params):
        return cls(
            0,
            {n: np.zeros_like(p) for n, p in params.items()},
            {n: np.zeros_like(p) for n, p in params.items()},
        )


def adam_step(params, grads, state: AdamState, cfg: TrainConfig):
    """Bias-corrected Adam; returns (new params, new state).

    A missing gradient counts as zero.
    """
    step = state.step + 1
    b1, b2 = cfg.beta1, cfg.beta2
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p)
        if g.shape != p.shape:
            raise ContractViolation(f"gradient of '{name}' has shape {g.shape}, expected {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericFault(f"non-finite gradient for parameter '{name}'", op="adam", param=name)
        m = b1 * state.m[name] + (1 - b1) * g
        v = b2 * state.v[name] + (1 - b2) * g * g
        m_hat = m / (1 - b1**step)
        v_hat = v / (1 - b2**step)
        new_params[name] = p - cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.eps)
        new_m[name], new_v[name] = m, v
    return new_params, AdamState(step, new_m, new_v)
