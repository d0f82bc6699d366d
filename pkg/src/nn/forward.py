"""
Batched forward passes. Every function returns the output together with a cache
that the matching backward function in gradients.py consumes.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.errors import DimensionMismatch, EmptyScenarioSet
from src.spmodel import ScenarioSet
from .params import DecoderParams, EncoderParams, IcnnParams, ReluNetParams, SurrogateModel


def relu(a: np.ndarray) -> np.ndarray:
    return np.maximum(a, 0.0)


@dataclass
class Batch:
    """
    Training rows. Either ``xi`` holds fixed scenario encodings, or ``features``
    stacks the scenario feature vectors of all rows with ``counts`` giving how many
    belong to each row, in row order.
    """
    x: np.ndarray
    y: np.ndarray
    features: Optional[np.ndarray] = None
    counts: Optional[np.ndarray] = None
    xi: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return int(self.x.shape[0])


def _segment_starts(counts: np.ndarray) -> np.ndarray:
    return np.concatenate([[0], np.cumsum(counts)[:-1]]).astype(int)


def encoder_forward(enc: EncoderParams, features: np.ndarray, counts: np.ndarray) -> Tuple[np.ndarray, Dict]:
    counts = np.asarray(counts, dtype=int)
    if features.shape[1] != enc.feature_dim:
        raise DimensionMismatch(f"scenario features have dimension {features.shape[1]}, "
                                f"encoder expects {enc.feature_dim}")
    if counts.min() < 1:
        raise EmptyScenarioSet("every row needs at least one scenario")
    a1 = features @ enc.psi1_weights[0].T + enc.psi1_biases[0]
    h1 = relu(a1)
    a2 = h1 @ enc.psi1_weights[1].T + enc.psi1_biases[1]
    h2 = relu(a2)
    pooled = np.add.reduceat(h2, _segment_starts(counts), axis=0) / counts[:, None]
    a3 = pooled @ enc.psi2_weights[0].T + enc.psi2_biases[0]
    xi = relu(a3)
    cache = {"features": features, "counts": counts, "a1": a1, "h1": h1, "a2": a2, "h2": h2,
             "pooled": pooled, "a3": a3}
    return xi, cache


def encode_features(enc: EncoderParams, features: np.ndarray) -> np.ndarray:
    """Encoding of one scenario set given as a (k, feature_dim) matrix"""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if features.shape[0] == 0:
        raise EmptyScenarioSet("cannot encode an empty scenario set")
    if features.shape[1] != enc.feature_dim:
        raise DimensionMismatch(f"scenario features have dimension {features.shape[1]}, "
                                f"encoder expects {enc.feature_dim}")
    h1 = relu(features @ enc.psi1_weights[0].T + enc.psi1_biases[0])
    h2 = relu(h1 @ enc.psi1_weights[1].T + enc.psi1_biases[1])
    # fsum is exactly rounded, so the mean does not depend on scenario order
    k = h2.shape[0]
    pooled = np.array([math.fsum(h2[:, j]) for j in range(h2.shape[1])]) / k
    return relu(enc.psi2_weights[0] @ pooled + enc.psi2_biases[0])


def encode_scenarios(enc: EncoderParams, scenarios: ScenarioSet) -> np.ndarray:
    if len(scenarios) == 0:
        raise EmptyScenarioSet("cannot encode an empty scenario set")
    return encode_features(enc, scenarios.features())


def icnn_forward(p: IcnnParams, z0: np.ndarray, skip_mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Dict]:
    """
    z0 is (B, input_dim). skip_mask, when given, multiplies the input on the skip
    path only (inverted dropout).
    """
    if z0.shape[1] != p.input_dim:
        raise DimensionMismatch(f"ICNN expects input dimension {p.input_dim}, got {z0.shape[1]}")
    z0s = z0 * skip_mask if skip_mask is not None else z0
    pre: List[np.ndarray] = []
    hidden: List[np.ndarray] = []
    out = None
    for k in range(p.n_layers):
        a = z0s @ p.skips[k].T + p.biases[k]
        if k > 0:
            a = a + hidden[-1] @ p.weights[k - 1].T
        if k == p.n_layers - 1:
            out = a[:, 0]
        else:
            pre.append(a)
            hidden.append(relu(a))
    return out, {"z0s": z0s, "mask": skip_mask, "pre": pre, "hidden": hidden}


def relu_forward(p: ReluNetParams, z0: np.ndarray, input_mask: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Dict]:
    """input_mask, when given, multiplies the network input (inverted dropout)"""
    if z0.shape[1] != p.input_dim:
        raise DimensionMismatch(f"ReLU network expects input dimension {p.input_dim}, got {z0.shape[1]}")
    if input_mask is not None:
        z0 = z0 * input_mask
    acts = [z0]
    pre: List[np.ndarray] = []
    h = z0
    for layer, (w, b) in enumerate(zip(p.weights, p.biases)):
        a = h @ w.T + b
        if layer == p.n_layers - 1:
            return a[:, 0], {"acts": acts, "pre": pre, "mask": input_mask}
        pre.append(a)
        h = relu(a)
        acts.append(h)
    raise AssertionError("unreachable")


def decoder_forward(dec: DecoderParams, z0: np.ndarray, dropout_mask: Optional[np.ndarray] = None):
    """Dropout reaches the skip path of an ICNN and the input layer of a ReLU network"""
    if isinstance(dec, IcnnParams):
        return icnn_forward(dec, z0, dropout_mask)
    return relu_forward(dec, z0, dropout_mask)


def _single_input(dec: DecoderParams, x, xi) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float)) if xi is not None else np.zeros(0)
    if x.shape[0] != dec.x_dim or xi.shape[0] != dec.xi_dim:
        raise DimensionMismatch(f"network expects x of length {dec.x_dim} and xi of length {dec.xi_dim}, "
                                f"got {x.shape[0]} and {xi.shape[0]}")
    return np.concatenate([x, xi])[None, :]


def forward_icnn(p: IcnnParams, x, xi) -> float:
    out, _ = icnn_forward(p, _single_input(p, x, xi))
    return float(out[0])


def forward_relu(p: ReluNetParams, x, xi) -> float:
    out, _ = relu_forward(p, _single_input(p, x, xi))
    return float(out[0])


def forward(dec: DecoderParams, x, xi) -> float:
    if isinstance(dec, IcnnParams):
        return forward_icnn(dec, x, xi)
    return forward_relu(dec, x, xi)


def predict_value(model: SurrogateModel, x, xi) -> float:
    """Surrogate value in original units, sign restored when trained on negated labels"""
    value = model.target_mean + model.target_std * forward(model.decoder, x, xi)
    return -value if model.negated else value
