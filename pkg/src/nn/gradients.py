"""
Manual backpropagation for the decoders and the scenario encoder, and the
penalized MSE loss used in training. Gradient lists follow the order of
``params.arrays()``.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np

from .forward import Batch, decoder_forward, encoder_forward
from .params import DecoderParams, EncoderParams, IcnnParams, ReluNetParams


def icnn_backward(p: IcnnParams, cache: Dict, dout: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    K = p.n_layers
    z0s, hidden, pre = cache["z0s"], cache["hidden"], cache["pre"]
    d_weights: List[Optional[np.ndarray]] = [None] * len(p.weights)
    d_skips: List[Optional[np.ndarray]] = [None] * K
    d_biases: List[Optional[np.ndarray]] = [None] * K
    dz0s = np.zeros_like(z0s)
    da = dout[:, None]
    for k in range(K - 1, -1, -1):
        d_skips[k] = da.T @ z0s
        d_biases[k] = da.sum(axis=0)
        dz0s += da @ p.skips[k]
        if k > 0:
            d_weights[k - 1] = da.T @ hidden[k - 1]
            dh = da @ p.weights[k - 1]
            da = dh * (pre[k - 1] > 0)
    dz0 = dz0s * cache["mask"] if cache["mask"] is not None else dz0s
    return d_weights + d_skips + d_biases, dz0


def relu_backward(p: ReluNetParams, cache: Dict, dout: np.ndarray) -> Tuple[List[np.ndarray], np.ndarray]:
    acts, pre = cache["acts"], cache["pre"]
    L = p.n_layers
    d_weights: List[Optional[np.ndarray]] = [None] * L
    d_biases: List[Optional[np.ndarray]] = [None] * L
    da = dout[:, None]
    for layer in range(L - 1, -1, -1):
        d_weights[layer] = da.T @ acts[layer]
        d_biases[layer] = da.sum(axis=0)
        dh = da @ p.weights[layer]
        if layer > 0:
            da = dh * (pre[layer - 1] > 0)
        else:
            if cache["mask"] is not None:
                dh = dh * cache["mask"]
            return d_weights + d_biases, dh
    raise AssertionError("unreachable")


def decoder_backward(dec: DecoderParams, cache: Dict, dout: np.ndarray):
    if isinstance(dec, IcnnParams):
        return icnn_backward(dec, cache, dout)
    return relu_backward(dec, cache, dout)


def encoder_backward(enc: EncoderParams, cache: Dict, dxi: np.ndarray) -> List[np.ndarray]:
    counts = cache["counts"]
    da3 = dxi * (cache["a3"] > 0)
    dW3 = da3.T @ cache["pooled"]
    db3 = da3.sum(axis=0)
    dpooled = da3 @ enc.psi2_weights[0]
    dh2 = np.repeat(dpooled / counts[:, None], counts, axis=0)
    da2 = dh2 * (cache["a2"] > 0)
    dW2 = da2.T @ cache["h1"]
    db2 = da2.sum(axis=0)
    dh1 = da2 @ enc.psi1_weights[1]
    da1 = dh1 * (cache["a1"] > 0)
    dW1 = da1.T @ cache["features"]
    db1 = da1.sum(axis=0)
    return [dW1, dW2, dW3, db1, db2, db3]


def penalty(arrays: List[np.ndarray], flags: List[bool], l1: float, l2: float) -> float:
    total = 0.0
    for a, f in zip(arrays, flags):
        if f:
            total += l1 * float(np.abs(a).sum()) + l2 * float((a * a).sum())
    return total


def loss_and_grads(decoder: DecoderParams, batch: Batch, encoder: Optional[EncoderParams] = None,
                   l1: float = 0.0, l2: float = 0.0,
                   dropout_mask: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray, List[np.ndarray]]:
    """
    Mean squared error of the decoder on the batch plus L1/L2 weight penalties.
    Returns (loss, predictions, gradients) with gradients ordered as
    decoder.arrays() followed by encoder.arrays() when an encoder is trained.
    """
    if encoder is not None:
        xi, enc_cache = encoder_forward(encoder, batch.features, batch.counts)
    else:
        xi, enc_cache = batch.xi, None
    z0 = np.hstack([batch.x, xi]) if xi is not None else batch.x
    pred, cache = decoder_forward(decoder, z0, dropout_mask)
    resid = pred - batch.y
    n = len(batch)
    loss = float(np.mean(resid * resid))
    dout = 2.0 * resid / n
    grads, dz0 = decoder_backward(decoder, cache, dout)

    arrays, flags = decoder.arrays(), decoder.penalized()
    if encoder is not None:
        grads = grads + encoder_backward(encoder, enc_cache, dz0[:, decoder.x_dim:])
        arrays, flags = arrays + encoder.arrays(), flags + encoder.penalized()

    if l1 > 0.0 or l2 > 0.0:
        loss += penalty(arrays, flags, l1, l2)
        grads = [g + (l1 * np.sign(a) + 2.0 * l2 * a if f else 0.0)
                 for g, a, f in zip(grads, arrays, flags)]
    return loss, pred, grads
