from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(seed: int, purpose: str, graph_id: str = "") -> int:
    """Stable 63-bit seed from ``(seed, purpose, graph_id)`` via blake2b."""
    h = hashlib.blake2b(f"{seed}\x1f{purpose}\x1f{graph_id}".encode(), digest_size=8).digest()
    return int.from_bytes(h, "little") >> 1


def rng_for(seed: int, purpose: str, graph_id: str = "") -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, purpose, graph_id))


class Adam:
    """Plain Adam over a dict of numpy parameters (updated in place)."""

    def __init__(self, params: dict[str, np.ndarray], lr: float = 0.01, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr, self.b1, self.b2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        c1 = 1 - self.b1 ** self.t
        c2 = 1 - self.b2 ** self.t
        for k, g in grads.items():
            m, v = self.m[k], self.v[k]
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            self.params[k] -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def log1pexp(x):
    """Numerically stable ``log(1 + exp(x))``."""
    return np.logaddexp(0.0, x)
