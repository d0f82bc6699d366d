import itertools
import logging
from dataclasses import replace
from typing import Optional, Sequence, Tuple

import pandas as pd

from src.datagen.dataset import SurrogateDataset
from src.spmodel import ScenarioSet
from .trainer import SurrogateTrainer, TrainConfig, TrainResult, init_models

logger = logging.getLogger(__name__)

HIDDEN_GRID = (64, 128)
LEARNING_RATE_GRID = (1e-3, 1e-2)
BATCH_GRID = (32, 128)


def grid_search(kind: str, dataset: SurrogateDataset, pool: Optional[ScenarioSet], base_config: TrainConfig,
                embed_dims: Sequence[int] = (64, 32, 16),
                hidden_grid: Sequence[int] = HIDDEN_GRID,
                lr_grid: Sequence[float] = LEARNING_RATE_GRID,
                batch_grid: Sequence[int] = BATCH_GRID,
                show_progress: Optional[bool] = None) -> Tuple[TrainResult, pd.DataFrame]:
    """
    Train one single-hidden-layer network per grid point and keep the lowest
    validation MAE. Ties keep the earlier grid point. Every candidate starts from
    the same seed so the table is reproducible.
    """
    feature_dim = None if pool is None else int(pool.features().shape[1])
    best: Optional[TrainResult] = None
    rows = []
    for hidden, lr, batch in itertools.product(hidden_grid, lr_grid, batch_grid):
        config = replace(base_config, learning_rate=lr, batch_size=batch)
        encoder, decoder = init_models(kind, dataset.x_dim, feature_dim, (hidden,), embed_dims, config.seed)
        result = SurrogateTrainer(config, show_progress).train(kind, encoder, decoder, dataset, pool)
        rows.append({"hidden_dim": hidden, "learning_rate": lr, "batch_size": batch,
                     "val_mae": result.val_mae, "train_mse": result.train_mse, "best_epoch": result.best_epoch})
        logger.info(f"grid point hidden={hidden} lr={lr} batch={batch}: val MAE {result.val_mae:.6g}")
        if best is None or result.val_mae < best.val_mae:
            best = result
    table = pd.DataFrame(rows)
    return best, table
