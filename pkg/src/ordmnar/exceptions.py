"""Error types raised by the fitting and simulation layers."""

from __future__ import annotations


class OrdmnarError(Exception):
    """Base class for all package errors."""


class ValidationError(OrdmnarError):
    """Raw input rows violate the dataset contract."""


class ProbabilityDomainError(OrdmnarError):
    """A parameter point produces a category probability <= 0, or a
    posterior weight denominator underflows to zero."""


class DegenerateDataError(OrdmnarError):
    """The weighted data cannot identify the model: a response category
    carries zero total weight, or a logistic fit sees only one class."""


class NonConvergenceError(OrdmnarError):
    """An iterative fit exhausted its iteration or step-halving budget.

    ``stage`` tags the failing sub-model ("outcome-model",
    "missingness-model", or "em").
    """

    def __init__(self, message: str, stage: str = "", iterations: int = 0):
        super().__init__(message)
        self.stage = stage
        self.iterations = iterations


class SeparationError(OrdmnarError):
    """Parameter estimates diverged (sup-norm beyond the divergence bound
    while the score is still large), the classic separation signature."""


class NotPositiveDefiniteError(OrdmnarError):
    """An information matrix is singular or not positive definite, so no
    covariance matrix exists."""


class AscentViolationError(OrdmnarError):
    """The observed-data log-likelihood decreased across an EM iteration,
    which indicates a bug in the E- or M-step; never expected in normal
    operation."""
