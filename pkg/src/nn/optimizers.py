from typing import List

import numpy as np

OPTIMIZERS = ("adam", "sgd", "rmsprop", "adagrad")


class Optimizer:
    """In-place first-order update of a list of parameter arrays"""

    def __init__(self, learning_rate: float):
        if learning_rate < 0:
            raise ValueError("learning rate must be non-negative")
        self.learning_rate = learning_rate
        self.state: List[dict] = []

    def step(self, params: List[np.ndarray], grads: List[np.ndarray]) -> None:
        if not self.state:
            self.state = [self._init_state(p) for p in params]
        for p, g, s in zip(params, grads, self.state):
            p -= self._update(g, s)

    def _init_state(self, p: np.ndarray) -> dict:
        return {}

    def _update(self, g: np.ndarray, state: dict) -> np.ndarray:
        raise NotImplementedError


class SGD(Optimizer):
    def __init__(self, learning_rate: float, momentum: float = 0.0):
        super().__init__(learning_rate)
        self.momentum = momentum

    def _init_state(self, p):
        return {"v": np.zeros_like(p)}

    def _update(self, g, state):
        state["v"] = self.momentum * state["v"] + g
        return self.learning_rate * state["v"]


class Adam(Optimizer):
    def __init__(self, learning_rate: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        super().__init__(learning_rate)
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def _init_state(self, p):
        return {"m": np.zeros_like(p), "v": np.zeros_like(p), "t": 0}

    def _update(self, g, state):
        state["t"] += 1
        state["m"] = self.beta1 * state["m"] + (1 - self.beta1) * g
        state["v"] = self.beta2 * state["v"] + (1 - self.beta2) * g * g
        m_hat = state["m"] / (1 - self.beta1 ** state["t"])
        v_hat = state["v"] / (1 - self.beta2 ** state["t"])
        return self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)


class RMSprop(Optimizer):
    def __init__(self, learning_rate: float, alpha: float = 0.99, eps: float = 1e-8):
        super().__init__(learning_rate)
        self.alpha, self.eps = alpha, eps

    def _init_state(self, p):
        return {"v": np.zeros_like(p)}

    def _update(self, g, state):
        state["v"] = self.alpha * state["v"] + (1 - self.alpha) * g * g
        return self.learning_rate * g / (np.sqrt(state["v"]) + self.eps)


class Adagrad(Optimizer):
    def __init__(self, learning_rate: float, eps: float = 1e-10):
        super().__init__(learning_rate)
        self.eps = eps

    def _init_state(self, p):
        return {"g2": np.zeros_like(p)}

    def _update(self, g, state):
        state["g2"] = state["g2"] + g * g
        return self.learning_rate * g / (np.sqrt(state["g2"]) + self.eps)


def make_optimizer(name: str, learning_rate: float) -> Optimizer:
    key = name.lower()
    if key == "adam":
        return Adam(learning_rate)
    if key == "sgd":
        return SGD(learning_rate)
    if key == "rmsprop":
        return RMSprop(learning_rate)
    if key == "adagrad":
        return Adagrad(learning_rate)
    raise ValueError(f"unknown optimizer '{name}', expected one of {OPTIMIZERS}")
