"""Variational learning of finite inverted Beta-Liouville mixture models."""

from .distribution import IblParams, log_pdf, sample, validate
from .evi import (
    FitConfig,
    FitReport,
    Moments,
    NumericalError,
    PriorHyperparams,
    VariationalPosterior,
    default_prior,
    fit,
)
from .mixture import (
    Dataset,
    IblmmModel,
    component_posteriors,
    load_dataset,
    load_model,
    log_likelihood,
    sample_mixture,
    save_dataset,
    save_model,
)
from .special import digamma, ln_gamma, log_sum_exp

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FitConfig",
    "FitReport",
    "IblParams",
    "IblmmModel",
    "Moments",
    "NumericalError",
    "PriorHyperparams",
    "VariationalPosterior",
    "component_posteriors",
    "default_prior",
    "digamma",
    "fit",
    "ln_gamma",
    "load_dataset",
    "load_model",
    "log_likelihood",
    "log_pdf",
    "log_sum_exp",
    "sample",
    "sample_mixture",
    "save_dataset",
    "save_model",
    "validate",
]
