"""
Interval bound propagation through a dense ReLU network.
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from src.errors import DimensionMismatch, UnboundedInput
from src.nn import ReluNetParams

BIG_M_FLOOR = 1e-6


@dataclass(frozen=True, eq=False)
class LayerBounds:
    """Pre-activation interval of every neuron in a layer and the interval after the activation"""
    pre_lower: np.ndarray
    pre_upper: np.ndarray
    post_lower: np.ndarray
    post_upper: np.ndarray

    @property
    def big_m_lower(self) -> np.ndarray:
        return np.minimum(self.pre_lower, -BIG_M_FLOOR)

    @property
    def big_m_upper(self) -> np.ndarray:
        return np.maximum(self.pre_upper, BIG_M_FLOOR)

    @property
    def stable_active(self) -> np.ndarray:
        return self.pre_lower >= 0.0

    @property
    def stable_inactive(self) -> np.ndarray:
        return self.pre_upper <= 0.0


def affine_bounds(W: np.ndarray, b: np.ndarray, lower: np.ndarray, upper: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    pos, neg = np.maximum(W, 0.0), np.minimum(W, 0.0)
    return pos @ lower + neg @ upper + b, pos @ upper + neg @ lower + b


def propagate_bounds(p: ReluNetParams, input_bounds: Sequence[Tuple[float, float]]) -> List[LayerBounds]:
    """
    Bounds for every layer, hidden layers first and the linear output last.
    input_bounds covers the whole network input [x, xi].
    """
    bounds = np.asarray(input_bounds, dtype=float).reshape(-1, 2)
    if bounds.shape[0] != p.input_dim:
        raise DimensionMismatch(f"network has {p.input_dim} inputs, got {bounds.shape[0]} input bounds")
    if not np.all(np.isfinite(bounds)):
        raise UnboundedInput("input bounds must be finite to derive big-M constants")
    if np.any(bounds[:, 0] > bounds[:, 1]):
        raise ValueError("input lower bound exceeds upper bound")
    lower, upper = bounds[:, 0], bounds[:, 1]
    layers: List[LayerBounds] = []
    for layer, (w, b) in enumerate(zip(p.weights, p.biases)):
        pre_lo, pre_hi = affine_bounds(w, b, lower, upper)
        if layer == p.n_layers - 1:
            layers.append(LayerBounds(pre_lo, pre_hi, pre_lo, pre_hi))
        else:
            lower, upper = np.maximum(pre_lo, 0.0), np.maximum(pre_hi, 0.0)
            layers.append(LayerBounds(pre_lo, pre_hi, lower, upper))
    return layers
