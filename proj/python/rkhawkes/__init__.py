"""ReLU multivariate Hawkes process estimation in a Gaussian RKHS."""

from ._core import (
    ConfigError,
    Error,
    EventData,
    FittedModel,
    IoError,
    NumericalError,
    ValidationError,
    builtin_model_names,
    fit,
    l1_error_matrix,
    load_model,
    score,
    simulate,
)

__all__ = [
    "ConfigError",
    "Error",
    "EventData",
    "FittedModel",
    "IoError",
    "NumericalError",
    "ValidationError",
    "builtin_model_names",
    "fit",
    "l1_error_matrix",
    "load_model",
    "score",
    "simulate",
]
