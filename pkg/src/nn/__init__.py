"""
Small dense-network engine: ICNN and ReLU decision networks, the deep-set
scenario encoder, manual backpropagation and first-order optimizers.
"""

from .params import (KIND_ICNN, KIND_RELU, KINDS, DecoderParams, EncoderParams, IcnnParams, ReluNetParams,
                     SurrogateModel, init_decoder, init_encoder, init_icnn, init_relu, project_nonnegative)
from .forward import (Batch, encode_features, encode_scenarios, forward, forward_icnn, forward_relu,
                      predict_value)
from .gradients import loss_and_grads
from .optimizers import OPTIMIZERS, Adagrad, Adam, RMSprop, SGD, make_optimizer
from .trainer import SurrogateTrainer, TrainConfig, TrainResult, init_models, train, training_summary
from .gradcheck import grad_check
from .model_file import MODEL_FORMAT_VERSION, model_digest, model_dumps, model_to_dict, save_model
from .presets import PRESETS, ArchitecturePreset, preset_for, with_widths
from .search import grid_search

__all__ = [
    "KIND_ICNN",
    "KIND_RELU",
    "KINDS",
    "DecoderParams",
    "EncoderParams",
    "IcnnParams",
    "ReluNetParams",
    "SurrogateModel",
    "init_decoder",
    "init_encoder",
    "init_icnn",
    "init_relu",
    "project_nonnegative",
    "Batch",
    "encode_features",
    "encode_scenarios",
    "forward",
    "forward_icnn",
    "forward_relu",
    "predict_value",
    "loss_and_grads",
    "OPTIMIZERS",
    "Adagrad",
    "Adam",
    "RMSprop",
    "SGD",
    "make_optimizer",
    "SurrogateTrainer",
    "TrainConfig",
    "TrainResult",
    "init_models",
    "train",
    "training_summary",
    "grad_check",
    "MODEL_FORMAT_VERSION",
    "model_digest",
    "model_dumps",
    "model_to_dict",
    "save_model",
    "PRESETS",
    "ArchitecturePreset",
    "preset_for",
    "with_widths",
    "grid_search",
]
