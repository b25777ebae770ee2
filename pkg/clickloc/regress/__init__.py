"""Linear regression of range and azimuth from global features."""

from .losses import loss_and_grad, hessp, LOSSES
from .model import TrainConfig, LinearModel, TARGETS, C_GRID, train, predict, select_C, fit_target, label_scale
from .store import save_model, load_model

__all__ = [
    "loss_and_grad",
    "hessp",
    "LOSSES",
    "TrainConfig",
    "LinearModel",
    "TARGETS",
    "C_GRID",
    "train",
    "predict",
    "select_C",
    "fit_target",
    "label_scale",
    "save_model",
    "load_model",
]
