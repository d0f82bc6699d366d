"""
Versioned JSON model files. Arrays are written row-major as nested lists; JSON
floats round-trip exactly, so a reloaded model reproduces predictions bitwise.
The reader lives in src.embed.network_file and needs only the parameter containers.
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from .params import EncoderParams, IcnnParams, SurrogateModel

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1


def _arrays(values: List[np.ndarray]) -> List[Any]:
    return [np.asarray(v, dtype=float).tolist() for v in values]


def model_to_dict(model: SurrogateModel) -> Dict[str, Any]:
    dec = model.decoder
    if isinstance(dec, IcnnParams):
        decoder = {"weights": _arrays(dec.weights), "skips": _arrays(dec.skips), "biases": _arrays(dec.biases)}
    else:
        decoder = {"weights": _arrays(dec.weights), "biases": _arrays(dec.biases)}
    encoder = None
    if model.encoder is not None:
        enc: EncoderParams = model.encoder
        encoder = {
            "feature_dim": enc.feature_dim,
            "embed_dim": enc.embed_dim,
            "psi1": {"weights": _arrays(enc.psi1_weights), "biases": _arrays(enc.psi1_biases)},
            "psi2": {"weights": _arrays(enc.psi2_weights), "biases": _arrays(enc.psi2_biases)},
        }
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "x_dim": dec.x_dim,
        "xi_dim": dec.xi_dim,
        "layer_dims": dec.layer_dims,
        "decoder": decoder,
        "encoder": encoder,
        "normalization": {"mean": model.target_mean, "std": model.target_std, "negated": model.negated},
        "provenance": model.provenance,
    }


def model_dumps(model: SurrogateModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True)


def save_model(path: Union[str, Path], model: SurrogateModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(model_dumps(model))
    logger.info(f"Saved {model.kind} model {model.decoder.layer_dims} to {path}")
    return path


def model_digest(path: Union[str, Path]) -> str:
    """sha256 of a model file, used to show one model served a whole scenario-count sweep"""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
