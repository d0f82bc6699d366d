import logging
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from src.milp import write_mip_text
from src.nn import KIND_ICNN, SurrogateModel, encode_scenarios
from src.spmodel import FirstStage, ScenarioSet
from .icnn_lp import embed_icnn_lp
from .model import EmbeddedModel
from .relu_mip import embed_relu_mip

logger = logging.getLogger(__name__)


def scenario_encoding(model: SurrogateModel, scenarios: Optional[ScenarioSet]) -> np.ndarray:
    """The fixed xi the network sees for a scenario set; empty for networks trained on x alone"""
    if model.encoder is None:
        return np.zeros(0)
    if scenarios is None:
        raise ValueError("a scenario set is required to embed a network with a scenario encoder")
    return encode_scenarios(model.encoder, scenarios)


def embed_model(model: SurrogateModel, first_stage: FirstStage, scenarios: Optional[ScenarioSet] = None,
                xi: Optional[np.ndarray] = None,
                input_bounds: Optional[Sequence[Tuple[float, float]]] = None) -> EmbeddedModel:
    """Encode the scenario set once, then build the LP (ICNN) or big-M MILP (ReLU) reformulation"""
    if xi is None:
        xi = scenario_encoding(model, scenarios)
    if model.kind == KIND_ICNN:
        return embed_icnn_lp(model.decoder, xi, first_stage, model.target_mean, model.target_std, model.negated)
    return embed_relu_mip(model.decoder, xi, first_stage, input_bounds, model.target_mean, model.target_std,
                          model.negated)


def export_embedded(embedded: EmbeddedModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(write_mip_text(embedded.program))
    logger.info(f"Wrote {embedded.size_summary.method} embedding to {path}")
    return path
