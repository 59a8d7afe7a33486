"""Proportional-odds regression with nonignorably missing ordinal responses.

Estimation is by EM over an augmented dataset (each missing response
expanded into weighted candidate rows), with standard errors from the
observed-data information. A simulation lab reproduces the estimator's
operating characteristics, and a CLI exposes fitting and simulation.
"""

from ._newton import FitOptions
from .binlogit import (
    LogisticDesign,
    LogisticFitResult,
    fit_logistic_weighted,
    logistic_prob,
    logit_log_likelihood,
    logit_neg_hessian,
    logit_row_scores,
    logit_score,
    missingness_design,
)
from .data import (
    AugmentedDataset,
    OrdinalDataset,
    augment_dataset,
    read_ordinal_csv,
    validate_dataset,
)
from .em import (
    EmFit,
    EmOptions,
    covariance_from_information,
    e_step_weights,
    em_fit,
    louis_information,
    observed_data_loglik,
    se_and_ci,
    wald_p_values,
)
from .exceptions import (
    AscentViolationError,
    DegenerateDataError,
    NonConvergenceError,
    NotPositiveDefiniteError,
    OrdmnarError,
    ProbabilityDomainError,
    SeparationError,
    ValidationError,
)
from .params import GammaParams, MissingnessParams, PoParams, sum_abs_change
from .po import (
    PoFitResult,
    category_prob_matrix,
    category_probs,
    default_po_init,
    fit_po_weighted,
    kappa_matrix,
    po_log_likelihood,
    po_neg_hessian,
    po_row_scores,
    po_score,
)

__version__ = "0.1.0"

__all__ = [
    "AscentViolationError",
    "AugmentedDataset",
    "DegenerateDataError",
    "EmFit",
    "EmOptions",
    "FitOptions",
    "GammaParams",
    "LogisticDesign",
    "LogisticFitResult",
    "MissingnessParams",
    "NonConvergenceError",
    "NotPositiveDefiniteError",
    "OrdinalDataset",
    "OrdmnarError",
    "PoFitResult",
    "PoParams",
    "ProbabilityDomainError",
    "SeparationError",
    "ValidationError",
    "augment_dataset",
    "category_prob_matrix",
    "category_probs",
    "covariance_from_information",
    "default_po_init",
    "e_step_weights",
    "em_fit",
    "fit_logistic_weighted",
    "fit_po_weighted",
    "kappa_matrix",
    "logistic_prob",
    "logit_log_likelihood",
    "logit_neg_hessian",
    "logit_row_scores",
    "logit_score",
    "louis_information",
    "missingness_design",
    "observed_data_loglik",
    "po_log_likelihood",
    "po_neg_hessian",
    "po_row_scores",
    "po_score",
    "read_ordinal_csv",
    "se_and_ci",
    "sum_abs_change",
    "validate_dataset",
    "wald_p_values",
]
