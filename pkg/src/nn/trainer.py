import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from config import settings
from src.datagen.dataset import SurrogateDataset
from src.errors import DimensionMismatch, NonFiniteLoss
from src.spmodel import ScenarioSet
from src.utils import named_rng
from .forward import Batch, decoder_forward, encoder_forward
from .gradients import loss_and_grads
from .optimizers import OPTIMIZERS, make_optimizer
from .params import (KIND_ICNN, KINDS, DecoderParams, EncoderParams, IcnnParams, SurrogateModel,
                     init_decoder, init_encoder, project_nonnegative)

STD_FLOOR = 1e-12
EVAL_CHUNK = 1024


@dataclass
class TrainConfig:
    epochs: int = 200
    batch_size: int = 32
    learning_rate: float = 1e-3
    l1_penalty: float = 0.0
    l2_penalty: float = 0.0
    optimizer: str = "adam"
    seed: int = 0
    dropout_rate: float = 0.0
    validation_fraction: float = 0.2
    negate_targets: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be at least 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if min(self.learning_rate, self.l1_penalty, self.l2_penalty) < 0:
            raise ValueError("learning rate and penalties must be non-negative")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must lie in [0, 1)")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must lie in [0, 1)")
        self.optimizer = self.optimizer.lower()
        if self.optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer '{self.optimizer}', expected one of {OPTIMIZERS}")

    @classmethod
    def from_settings(cls, **overrides) -> "TrainConfig":
        values = dict(epochs=settings.epochs, batch_size=settings.batch_size,
                      learning_rate=settings.learning_rate, validation_fraction=settings.validation_fraction)
        values.update(overrides)
        return cls(**values)


@dataclass
class TrainResult:
    model: SurrogateModel
    train_mse: float
    val_mae: float
    best_epoch: int
    history: List[Dict[str, float]] = field(default_factory=list)

    @property
    def params(self) -> Tuple[Optional[EncoderParams], DecoderParams]:
        return self.model.encoder, self.model.decoder


class _Data:
    """Dataset arrays plus the pool lookup needed to assemble encoder batches"""

    def __init__(self, dataset: SurrogateDataset, pool: Optional[ScenarioSet], use_encoder: bool):
        self.x = dataset.x_matrix()
        self.labels = dataset.labels()
        self.features = None
        self.rows: List[np.ndarray] = []
        if use_encoder:
            if pool is None:
                raise ValueError("a scenario pool is required to train the encoder")
            index = {sid: i for i, sid in enumerate(pool.ids)}
            self.features = pool.features()
            self.rows = [np.array([index[sid] for sid in r.scenario_ids], dtype=int) for r in dataset]

    def batch(self, idx: np.ndarray, targets: np.ndarray) -> Batch:
        if self.features is None:
            return Batch(x=self.x[idx], y=targets[idx])
        rows = [self.rows[i] for i in idx]
        return Batch(x=self.x[idx], y=targets[idx], features=self.features[np.concatenate(rows)],
                     counts=np.array([r.size for r in rows]))


class SurrogateTrainer:
    """
    Joint mini-batch training of the scenario encoder and a decision network on
    standardized targets, keeping the parameters with the best validation MAE.
    """

    def __init__(self, config: Optional[TrainConfig] = None, show_progress: Optional[bool] = None):
        self.config = config or TrainConfig.from_settings()
        self.show_progress = settings.show_progress if show_progress is None else show_progress
        self.logger = logging.getLogger(__name__)

    def train(self, kind: str, encoder: Optional[EncoderParams], decoder: DecoderParams,
              dataset: SurrogateDataset, pool: Optional[ScenarioSet] = None) -> TrainResult:
        cfg = self.config
        self._check(kind, encoder, decoder, dataset)
        encoder = encoder.copy() if encoder is not None else None
        decoder = decoder.copy()
        data = _Data(dataset, pool, encoder is not None)

        train_idx, val_idx = self._split(len(dataset))
        targets = -data.labels if cfg.negate_targets else data.labels.copy()
        mean = float(np.mean(targets[train_idx]))
        std = float(np.std(targets[train_idx]))
        if std < STD_FLOOR:
            std = 1.0
        scaled = (targets - mean) / std

        optimizer = make_optimizer(cfg.optimizer, cfg.learning_rate)
        shuffle_rng = named_rng("train", cfg.seed, "shuffle")
        dropout_rng = named_rng("train", cfg.seed, "dropout")

        best_mae = self._mae(encoder, decoder, data, val_idx, targets, mean, std)
        best = (encoder.copy() if encoder is not None else None, decoder.copy(), 0)
        history: List[Dict[str, float]] = []
        self.logger.info(f"Training {kind} on {len(train_idx)} rows ({len(val_idx)} validation), "
                         f"{cfg.epochs} epochs, {cfg.optimizer} lr={cfg.learning_rate}; "
                         f"initial val MAE {best_mae:.6g}")

        epochs = tqdm(range(1, cfg.epochs + 1), desc=f"train {kind}", disable=not self.show_progress)
        for epoch in epochs:
            order = shuffle_rng.permutation(train_idx)
            losses = []
            for start in range(0, order.size, cfg.batch_size):
                idx = order[start:start + cfg.batch_size]
                batch = data.batch(idx, scaled)
                mask = None
                if cfg.dropout_rate > 0.0:
                    keep = dropout_rng.uniform(size=(idx.size, decoder.input_dim)) >= cfg.dropout_rate
                    mask = keep / (1.0 - cfg.dropout_rate)
                loss, _, grads = loss_and_grads(decoder, batch, encoder, cfg.l1_penalty, cfg.l2_penalty, mask)
                if not math.isfinite(loss):
                    diagnostics = {"epoch": epoch, "batch_start": start, "loss": loss,
                                   "max_abs_param": self._max_abs(encoder, decoder)}
                    self.logger.error(f"Non-finite loss at epoch {epoch}: {diagnostics}")
                    raise NonFiniteLoss(f"loss became {loss} at epoch {epoch}", diagnostics)
                arrays = decoder.arrays() + (encoder.arrays() if encoder is not None else [])
                optimizer.step(arrays, grads)
                if kind == KIND_ICNN:
                    decoder = project_nonnegative(decoder)
                losses.append(loss)

            val_mae = self._mae(encoder, decoder, data, val_idx, targets, mean, std)
            history.append({"epoch": epoch, "train_loss": float(np.mean(losses)), "val_mae": val_mae})
            if val_mae < best_mae:
                best_mae = val_mae
                best = (encoder.copy() if encoder is not None else None, decoder.copy(), epoch)
            self.logger.debug(f"epoch {epoch}: train loss {history[-1]['train_loss']:.6g}, val MAE {val_mae:.6g}")

        best_encoder, best_decoder, best_epoch = best
        train_mse = self._mse(best_encoder, best_decoder, data, train_idx, targets, mean, std)
        self.logger.info(f"Best val MAE {best_mae:.6g} at epoch {best_epoch}, train MSE {train_mse:.6g}")
        model = SurrogateModel(kind=kind, encoder=best_encoder, decoder=best_decoder, target_mean=mean,
                               target_std=std, negated=cfg.negate_targets,
                               provenance={"train_seed": cfg.seed, "best_epoch": best_epoch})
        return TrainResult(model=model, train_mse=train_mse, val_mae=best_mae, best_epoch=best_epoch,
                           history=history)

    def _check(self, kind, encoder, decoder, dataset) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown network kind '{kind}', expected one of {KINDS}")
        if (kind == KIND_ICNN) != isinstance(decoder, IcnnParams):
            raise ValueError(f"decoder parameters do not match kind '{kind}'")
        if len(dataset) == 0:
            raise ValueError("cannot train on an empty dataset")
        if dataset.x_dim != decoder.x_dim:
            raise DimensionMismatch(f"dataset x has dimension {dataset.x_dim}, network expects {decoder.x_dim}")
        xi_dim = encoder.embed_dim if encoder is not None else 0
        if xi_dim != decoder.xi_dim:
            raise DimensionMismatch(f"encoder produces {xi_dim} features, network expects {decoder.xi_dim}")

    def _split(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        perm = named_rng("train", self.config.seed, "split").permutation(n)
        n_val = int(round(self.config.validation_fraction * n))
        if n > 1 and self.config.validation_fraction > 0:
            n_val = min(max(n_val, 1), n - 1)
        else:
            n_val = 0
        train_idx, val_idx = np.sort(perm[n_val:]), np.sort(perm[:n_val])
        # a single row is both the training and the validation set
        return train_idx, (val_idx if n_val else train_idx)

    @staticmethod
    def _predict(encoder, decoder, data: _Data, idx: np.ndarray, targets: np.ndarray) -> np.ndarray:
        out = []
        for start in range(0, idx.size, EVAL_CHUNK):
            batch = data.batch(idx[start:start + EVAL_CHUNK], targets)
            if encoder is not None:
                xi, _ = encoder_forward(encoder, batch.features, batch.counts)
                z0 = np.hstack([batch.x, xi])
            else:
                z0 = batch.x
            pred, _ = decoder_forward(decoder, z0)
            out.append(pred)
        return np.concatenate(out)

    def _mae(self, encoder, decoder, data, idx, targets, mean, std) -> float:
        pred = mean + std * self._predict(encoder, decoder, data, idx, targets)
        return float(np.mean(np.abs(pred - targets[idx])))

    def _mse(self, encoder, decoder, data, idx, targets, mean, std) -> float:
        pred = mean + std * self._predict(encoder, decoder, data, idx, targets)
        return float(np.mean((pred - targets[idx]) ** 2))

    @staticmethod
    def _max_abs(encoder, decoder) -> float:
        arrays = decoder.arrays() + (encoder.arrays() if encoder is not None else [])
        return float(max(np.max(np.abs(a)) if a.size else 0.0 for a in arrays))


def train(kind: str, encoder: Optional[EncoderParams], decoder: DecoderParams, dataset: SurrogateDataset,
          config: Optional[TrainConfig] = None, pool: Optional[ScenarioSet] = None,
          show_progress: Optional[bool] = None) -> TrainResult:
    return SurrogateTrainer(config, show_progress).train(kind, encoder, decoder, dataset, pool)


def training_summary(result: TrainResult) -> Dict[str, Any]:
    model = result.model
    return {
        "kind": model.kind,
        "layer_dims": model.decoder.layer_dims,
        "embed_dims": model.encoder.dims if model.encoder is not None else [],
        "train_mse": result.train_mse,
        "val_mae": result.val_mae,
        "best_epoch": result.best_epoch,
        "target_mean": model.target_mean,
        "target_std": model.target_std,
    }


def init_models(kind: str, x_dim: int, feature_dim: Optional[int], hidden_dims, embed_dims=None,
                seed: int = 0) -> Tuple[Optional[EncoderParams], DecoderParams]:
    """Fresh encoder and decoder; feature_dim None trains the decoder on x alone"""
    rng = named_rng("init", kind, seed)
    encoder = None
    xi_dim = 0
    if feature_dim is not None:
        encoder = init_encoder(feature_dim, embed_dims, rng)
        xi_dim = encoder.embed_dim
    return encoder, init_decoder(kind, x_dim, xi_dim, hidden_dims, rng)
