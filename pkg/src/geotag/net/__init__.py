from .layers import BatchNorm, Conv2D, Dense, Dropout, GlobalAvgPool, MaxPool2D
from .model import Model, ModelConfig, build_model, load_model, make_config, multitask_loss
from .optim import Adam
from .training import TrainConfig, predict, train

__all__ = [
    "Adam",
    "BatchNorm",
    "Conv2D",
    "Dense",
    "Dropout",
    "GlobalAvgPool",
    "MaxPool2D",
    "Model",
    "ModelConfig",
    "TrainConfig",
    "build_model",
    "load_model",
    "make_config",
    "multitask_loss",
    "predict",
    "train",
]
