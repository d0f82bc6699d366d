"""
Plain parameter containers for the decision networks and the scenario encoder.
Matrices are stored (out, in) so a layer computes  W @ z  for a single input.
These types carry no training logic and are shared with the embedding code.
"""

import copy
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

KIND_ICNN = "icnn"
KIND_RELU = "relu"
KINDS = (KIND_ICNN, KIND_RELU)


@dataclass
class IcnnParams:
    """
    z_1     = relu(S_0 z0 + b_0)
    z_{k+1} = relu(W_k z_k + S_k z0 + b_k),   k = 1..K-2
    out     =      W_{K-1} z_{K-1} + S_{K-1} z0 + b_{K-1}
    with z0 = [x, xi] and every W_k >= 0. ``weights[k-1]`` holds W_k.
    """
    x_dim: int
    xi_dim: int
    weights: List[np.ndarray]
    skips: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.skips) != len(self.biases) or len(self.weights) != len(self.skips) - 1:
            raise ValueError("ICNN needs K skips, K biases and K-1 hidden weights")
        if self.skips[-1].shape[0] != 1:
            raise ValueError("ICNN output layer must be scalar")

    @property
    def input_dim(self) -> int:
        return self.x_dim + self.xi_dim

    @property
    def layer_dims(self) -> List[int]:
        return [self.input_dim] + [s.shape[0] for s in self.skips]

    @property
    def hidden_dims(self) -> List[int]:
        return self.layer_dims[1:-1]

    @property
    def n_layers(self) -> int:
        return len(self.skips)

    def arrays(self) -> List[np.ndarray]:
        return list(self.weights) + list(self.skips) + list(self.biases)

    def penalized(self) -> List[bool]:
        return [True] * (len(self.weights) + len(self.skips)) + [False] * len(self.biases)

    def nonnegative(self) -> List[bool]:
        return [True] * len(self.weights) + [False] * (len(self.skips) + len(self.biases))

    def copy(self) -> "IcnnParams":
        return copy.deepcopy(self)


@dataclass
class ReluNetParams:
    """Dense ReLU network on z0 = [x, xi] with a linear scalar output"""
    x_dim: int
    xi_dim: int
    weights: List[np.ndarray]
    biases: List[np.ndarray]

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ValueError("ReLU network needs one bias per weight matrix")
        if self.weights[-1].shape[0] != 1:
            raise ValueError("ReLU network output layer must be scalar")
        dims = [self.x_dim + self.xi_dim]
        for w in self.weights:
            if w.shape[1] != dims[-1]:
                raise ValueError(f"layer expects {w.shape[1]} inputs, previous layer gives {dims[-1]}")
            dims.append(w.shape[0])

    @property
    def input_dim(self) -> int:
        return self.x_dim + self.xi_dim

    @property
    def layer_dims(self) -> List[int]:
        return [self.input_dim] + [w.shape[0] for w in self.weights]

    @property
    def hidden_dims(self) -> List[int]:
        return self.layer_dims[1:-1]

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def arrays(self) -> List[np.ndarray]:
        return list(self.weights) + list(self.biases)

    def penalized(self) -> List[bool]:
        return [True] * len(self.weights) + [False] * len(self.biases)

    def nonnegative(self) -> List[bool]:
        return [False] * (len(self.weights) + len(self.biases))

    def copy(self) -> "ReluNetParams":
        return copy.deepcopy(self)


@dataclass
class EncoderParams:
    """Deep-set encoder: psi1 (two ReLU layers per scenario), mean over scenarios, psi2 (one ReLU layer)"""
    feature_dim: int
    psi1_weights: List[np.ndarray]
    psi1_biases: List[np.ndarray]
    psi2_weights: List[np.ndarray]
    psi2_biases: List[np.ndarray]

    def __post_init__(self):
        if self.psi1_weights[0].shape[1] != self.feature_dim:
            raise ValueError("psi1 input dimension must equal the scenario feature dimension")

    @property
    def embed_dim(self) -> int:
        return int(self.psi2_weights[-1].shape[0])

    @property
    def dims(self) -> List[int]:
        return [w.shape[0] for w in self.psi1_weights + self.psi2_weights]

    def arrays(self) -> List[np.ndarray]:
        return list(self.psi1_weights) + list(self.psi2_weights) + list(self.psi1_biases) + list(self.psi2_biases)

    def penalized(self) -> List[bool]:
        n_w = len(self.psi1_weights) + len(self.psi2_weights)
        return [True] * n_w + [False] * n_w

    def nonnegative(self) -> List[bool]:
        return [False] * len(self.arrays())

    def copy(self) -> "EncoderParams":
        return copy.deepcopy(self)


DecoderParams = Union[IcnnParams, ReluNetParams]


@dataclass
class SurrogateModel:
    """A trained decoder with its encoder and the target normalization (value = mean + std * output)"""
    kind: str
    encoder: Optional[EncoderParams]
    decoder: DecoderParams
    target_mean: float = 0.0
    target_std: float = 1.0
    negated: bool = False
    provenance: dict = field(default_factory=dict)


def _uniform(rng: np.random.Generator, fan_in: int, shape) -> np.ndarray:
    bound = 1.0 / np.sqrt(max(fan_in, 1))
    return rng.uniform(-bound, bound, size=shape)


def init_icnn(x_dim: int, xi_dim: int, hidden_dims: Sequence[int], rng: np.random.Generator) -> IcnnParams:
    """Fan-in uniform initialization; hidden-to-hidden weights start non-negative"""
    d0 = x_dim + xi_dim
    dims = list(hidden_dims) + [1]
    weights, skips, biases = [], [], []
    prev = None
    for width in dims:
        fan_in = d0 + (prev or 0)
        if prev is not None:
            weights.append(np.abs(_uniform(rng, fan_in, (width, prev))))
        skips.append(_uniform(rng, fan_in, (width, d0)))
        biases.append(_uniform(rng, fan_in, (width,)))
        prev = width
    return IcnnParams(x_dim=x_dim, xi_dim=xi_dim, weights=weights, skips=skips, biases=biases)


def init_relu(x_dim: int, xi_dim: int, hidden_dims: Sequence[int], rng: np.random.Generator) -> ReluNetParams:
    dims = [x_dim + xi_dim] + list(hidden_dims) + [1]
    weights = [_uniform(rng, dims[k], (dims[k + 1], dims[k])) for k in range(len(dims) - 1)]
    biases = [_uniform(rng, dims[k], (dims[k + 1],)) for k in range(len(dims) - 1)]
    return ReluNetParams(x_dim=x_dim, xi_dim=xi_dim, weights=weights, biases=biases)


def init_encoder(feature_dim: int, embed_dims: Sequence[int], rng: np.random.Generator) -> EncoderParams:
    """embed_dims = (psi1 layer 1, psi1 layer 2, psi2 output)"""
    if len(embed_dims) != 3:
        raise ValueError("encoder needs three widths: two psi1 layers and the psi2 output")
    d1, d2, d3 = embed_dims
    return EncoderParams(
        feature_dim=feature_dim,
        psi1_weights=[_uniform(rng, feature_dim, (d1, feature_dim)), _uniform(rng, d1, (d2, d1))],
        psi1_biases=[_uniform(rng, feature_dim, (d1,)), _uniform(rng, d1, (d2,))],
        psi2_weights=[_uniform(rng, d2, (d3, d2))],
        psi2_biases=[_uniform(rng, d2, (d3,))],
    )


def init_decoder(kind: str, x_dim: int, xi_dim: int, hidden_dims: Sequence[int],
                 rng: np.random.Generator) -> DecoderParams:
    if kind == KIND_ICNN:
        return init_icnn(x_dim, xi_dim, hidden_dims, rng)
    if kind == KIND_RELU:
        return init_relu(x_dim, xi_dim, hidden_dims, rng)
    raise ValueError(f"unknown network kind '{kind}'")


def project_nonnegative(p: IcnnParams) -> IcnnParams:
    """Clamp hidden-to-hidden weights at zero; skips and biases are left as they are"""
    return IcnnParams(
        x_dim=p.x_dim,
        xi_dim=p.xi_dim,
        weights=[np.maximum(w, 0.0) for w in p.weights],
        skips=[s.copy() for s in p.skips],
        biases=[b.copy() for b in p.biases],
    )
