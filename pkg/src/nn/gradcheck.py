from typing import Optional, Tuple, Union

import numpy as np

from .forward import Batch
from .gradients import loss_and_grads
from .params import KIND_ICNN, DecoderParams, EncoderParams, IcnnParams

ParamsArg = Union[DecoderParams, Tuple[Optional[EncoderParams], DecoderParams]]


def grad_check(kind: str, params: ParamsArg, sample: Batch, eps: float = 1e-5) -> float:
    """
    Largest relative error |analytic - numeric| / max(1, |analytic| + |numeric|)
    between backprop gradients of the plain MSE loss and central differences,
    over every entry of every parameter tensor. Parameters are restored afterwards.
    """
    if not 1e-7 <= eps <= 1e-3:
        raise ValueError("eps must lie in [1e-7, 1e-3]")
    encoder, decoder = params if isinstance(params, tuple) else (None, params)
    if (kind == KIND_ICNN) != isinstance(decoder, IcnnParams):
        raise ValueError(f"decoder parameters do not match kind '{kind}'")

    _, _, analytic = loss_and_grads(decoder, sample, encoder)
    arrays = decoder.arrays() + (encoder.arrays() if encoder is not None else [])
    worst = 0.0
    for a, g in zip(arrays, analytic):
        flat, gflat = a.reshape(-1), np.asarray(g).reshape(-1)
        for i in range(flat.size):
            saved = flat[i]
            flat[i] = saved + eps
            up, _, _ = loss_and_grads(decoder, sample, encoder)
            flat[i] = saved - eps
            down, _, _ = loss_and_grads(decoder, sample, encoder)
            flat[i] = saved
            numeric = (up - down) / (2.0 * eps)
            err = abs(gflat[i] - numeric) / max(1.0, abs(gflat[i]) + abs(numeric))
            worst = max(worst, err)
    return worst
