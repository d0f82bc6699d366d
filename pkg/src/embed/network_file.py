"""
Reader for the versioned model JSON written by src.nn.model_file. Only the
parameter containers are needed to rebuild a model.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from src.errors import FormatError
from src.nn.params import KIND_ICNN, KINDS, EncoderParams, IcnnParams, ReluNetParams, SurrogateModel

SUPPORTED_VERSIONS = (1,)


def _arrays(values) -> list:
    return [np.array(v, dtype=float) for v in values]


def _matrices(values) -> list:
    return [np.array(v, dtype=float, ndmin=2) for v in values]


def network_from_dict(data: Dict[str, Any]) -> SurrogateModel:
    version = data.get("format_version")
    if version not in SUPPORTED_VERSIONS:
        raise FormatError(f"unsupported model format version {version!r}")
    kind = data.get("kind")
    if kind not in KINDS:
        raise FormatError(f"unknown network kind {kind!r}")
    try:
        x_dim, xi_dim = int(data["x_dim"]), int(data["xi_dim"])
        dec = data["decoder"]
        if kind == KIND_ICNN:
            decoder = IcnnParams(x_dim=x_dim, xi_dim=xi_dim, weights=_matrices(dec["weights"]),
                                 skips=_matrices(dec["skips"]), biases=_arrays(dec["biases"]))
        else:
            decoder = ReluNetParams(x_dim=x_dim, xi_dim=xi_dim, weights=_matrices(dec["weights"]),
                                    biases=_arrays(dec["biases"]))
        encoder = None
        if data.get("encoder") is not None:
            enc = data["encoder"]
            encoder = EncoderParams(
                feature_dim=int(enc["feature_dim"]),
                psi1_weights=_matrices(enc["psi1"]["weights"]),
                psi1_biases=_arrays(enc["psi1"]["biases"]),
                psi2_weights=_matrices(enc["psi2"]["weights"]),
                psi2_biases=_arrays(enc["psi2"]["biases"]),
            )
            if encoder.embed_dim != xi_dim:
                raise FormatError(f"encoder output {encoder.embed_dim} does not match xi_dim {xi_dim}")
        norm = data["normalization"]
        model = SurrogateModel(kind=kind, encoder=encoder, decoder=decoder, target_mean=float(norm["mean"]),
                               target_std=float(norm["std"]), negated=bool(norm.get("negated", False)),
                               provenance=data.get("provenance", {}))
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"malformed model file: {e}") from e
    if list(data.get("layer_dims", decoder.layer_dims)) != decoder.layer_dims:
        raise FormatError(f"layer_dims {data['layer_dims']} disagree with the stored weights {decoder.layer_dims}")
    return model


def load_network_file(path: Union[str, Path]) -> SurrogateModel:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path} is not valid JSON: {e}") from e
    return network_from_dict(data)
