"""Kernel learning with ARD random Fourier features and learned feature relevances."""

from .data import Dataset, gen_se1, gen_se2, load_csv, split_threeway, standardize_apply, standardize_fit
from .errors import (ArgumentError, DataError, MetricError, NumericalError, RFFNetError,
                     SerializationError, TrainingError, UsageError)
from .kernels import BACKEND
from .metrics import accuracy, auc, f1, mse
from .model import ModelState, fit, load, predict, predict_proba, relevances, save
from .objective import LossKind, ObjectiveParams, gradients, loss_value, objective_value, prox_l2
from .optimizer import TrainConfig, auto_num_features, epoch_step, fit_loop, split_train_val
from .spectral import (ApproxARDKernel, ARDGaussianKernel, FourierFeatures, approx_kernel, ard_gaussian_kernel, krr_oracle, rff_map,
                       sample_features, scaled_frequency_sample)

__version__ = "0.1.0"

__all__ = [
    "ARDGaussianKernel", "ApproxARDKernel", "BACKEND", "ArgumentError", "DataError", "Dataset",
    "FourierFeatures", "LossKind", "MetricError", "ModelState", "NumericalError", "ObjectiveParams",
    "RFFNetError", "SerializationError", "TrainConfig", "TrainingError", "UsageError", "accuracy",
    "approx_kernel", "ard_gaussian_kernel", "auc", "auto_num_features", "epoch_step", "f1", "fit",
    "fit_loop", "gen_se1", "gen_se2", "gradients", "krr_oracle", "load", "load_csv", "loss_value",
    "mse", "objective_value", "predict", "predict_proba", "prox_l2", "relevances", "rff_map",
    "sample_features", "save", "scaled_frequency_sample", "split_threeway", "split_train_val",
    "standardize_apply", "standardize_fit",
]
