"""
Best architectures and training settings found by random search, per method and
benchmark instance. Widths: ``hidden_dims`` for the decision network,
``embed_dims`` for (psi1 layer 1, psi1 layer 2, psi2).
"""

import re
from dataclasses import dataclass, replace
from typing import Dict, Tuple

from .params import KIND_ICNN, KIND_RELU
from .trainer import TrainConfig


@dataclass(frozen=True)
class ArchitecturePreset:
    batch_size: int
    learning_rate: float
    l1_penalty: float
    l2_penalty: float
    optimizer: str
    dropout_rate: float
    hidden_dims: Tuple[int, ...]
    embed_dims: Tuple[int, int, int]

    def train_config(self, epochs: int, seed: int = 0, **overrides) -> TrainConfig:
        values = dict(epochs=epochs, batch_size=self.batch_size, learning_rate=self.learning_rate,
                      l1_penalty=self.l1_penalty, l2_penalty=self.l2_penalty, optimizer=self.optimizer,
                      dropout_rate=self.dropout_rate, seed=seed)
        values.update(overrides)
        return TrainConfig(**values)


_CFLP_SMALL = ArchitecturePreset(128, 0.00436, 0.09067, 0.02603, "adam", 0.04226, (512,), (512, 64, 16))
_SHARED = ArchitecturePreset(128, 0.08384, 0.03226, 0.07454, "rmsprop", 0.00238, (512,), (64, 128, 8))

PRESETS: Dict[str, Dict[str, ArchitecturePreset]] = {
    KIND_ICNN: {
        "CFLP_10_10": _CFLP_SMALL,
        "CFLP_25_25": _SHARED,
        "CFLP_50_50": _SHARED,
        "SSLP_5_25": _SHARED,
        "SSLP_15_45": ArchitecturePreset(16, 0.04383, 0.00976, 0.0, "rmsprop", 0.04066, (256,), (128, 16, 32)),
        "SSLP_10_50": ArchitecturePreset(16, 0.02639, 0.00120, 0.0, "adam", 0.02918, (512,), (64, 16, 8)),
        "INVP": ArchitecturePreset(32, 0.00768, 0.0, 0.0, "rmsprop", 0.07346, (256,), (128, 64, 32)),
    },
    KIND_RELU: {
        "CFLP_10_10": _CFLP_SMALL,
        "CFLP_25_25": _SHARED,
        "CFLP_50_50": _SHARED,
        "SSLP_5_25": _SHARED,
        "SSLP_15_45": ArchitecturePreset(128, 0.09621, 0.02965, 0.00040, "adam", 0.01053, (128,), (256, 64, 64)),
        "SSLP_10_50": _SHARED,
        "INVP": ArchitecturePreset(128, 0.00433, 0.00500, 0.00841, "adam", 0.04056, (128,), (512, 128, 8)),
    },
}


def _base_instance(name: str) -> str:
    """Drop any trailing scenario count; every INVP variant shares one entry"""
    upper = name.upper()
    if upper.startswith("INVP"):
        return "INVP"
    match = re.fullmatch(r"((?:CFLP|SSLP)_\d+_\d+)(?:_\d+)?", upper)
    return match.group(1) if match else upper


def preset_for(kind: str, instance: str) -> ArchitecturePreset:
    table = PRESETS.get(kind)
    if table is None:
        raise ValueError(f"unknown network kind '{kind}'")
    key = _base_instance(instance)
    if key not in table:
        raise KeyError(f"no {kind} preset for instance '{instance}'; known: {sorted(table)}")
    return table[key]


def with_widths(preset: ArchitecturePreset, hidden_dims=None, embed_dims=None) -> ArchitecturePreset:
    return replace(preset,
                   hidden_dims=tuple(hidden_dims) if hidden_dims is not None else preset.hidden_dims,
                   embed_dims=tuple(embed_dims) if embed_dims is not None else preset.embed_dims)
