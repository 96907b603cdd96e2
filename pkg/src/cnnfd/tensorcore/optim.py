"""AdamW optimizer with decoupled weight decay."""

from dataclasses import dataclass, field

import numpy as np

from . import elem_kernels as ek


@dataclass
class AdamWConfig:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01


@dataclass
class OptimizerState:
    """First/second moment estimates per parameter plus the step counter."""
    config: AdamWConfig
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    t: int = 0

    def slot(self, name, like):
        if name not in self.m:
            self.m[name] = np.zeros_like(like)
            self.v[name] = np.zeros_like(like)
        return self.m[name], self.v[name]


def adamw_step(params, state, learning_rate=None):
    """One AdamW update over `params` (iterable of objects with .name/.data/.grad).

    The decay term `lr * weight_decay * theta` is applied separately from the
    adaptive update.  Mutates parameter data and optimizer state in place.
    """
    cfg = state.config
    lr = cfg.learning_rate if learning_rate is None else learning_rate
    if lr <= 0:
        raise ValueError(f"adamw_step: learning rate must be positive, got {lr}")
    state.t += 1
    b1, b2 = cfg.beta1, cfg.beta2
    bc1 = 1.0 - b1 ** state.t
    bc2 = 1.0 - b2 ** state.t
    for p in params:
        m, v = state.slot(p.name, p.data)
        decay = cfg.weight_decay if getattr(p, "decay", True) else 0.0
        ek.adamw_update(p.data, np.ascontiguousarray(p.grad), m, v,
                        float(lr), b1, b2, cfg.eps, float(decay), bc1, bc2)
