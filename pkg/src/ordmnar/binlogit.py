"""Weighted binary logistic regression.

Used for the missingness model, whose design row is (1, x_miss, y) with the
response code entering as a numeric regressor, and for its covariates-only
initialization fit. Rows carry nonnegative weights (EM posterior weights or
ones).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logit

from . import kernels
from ._newton import FitOptions, newton_maximize
from .data import AugmentedDataset
from .exceptions import DegenerateDataError, ValidationError


@dataclass(frozen=True)
class LogisticDesign:
    """Design matrix, binary response, and row weights for one logistic fit."""

    Z: np.ndarray
    r: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Z", np.ascontiguousarray(self.Z, dtype=np.float64))
        object.__setattr__(self, "r", np.asarray(self.r, dtype=np.float64))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=np.float64))
        m = self.Z.shape[0]
        if self.r.shape != (m,) or self.weights.shape != (m,):
            raise ValidationError("design arrays disagree in length")
        if not np.all((self.r == 0.0) | (self.r == 1.0)):
            raise ValidationError("binary response must be 0/1")
        if np.any(self.weights < 0.0) or not np.all(np.isfinite(self.weights)):
            raise ValidationError("weights must be finite and nonnegative")
        if not np.all(np.isfinite(self.Z)):
            raise ValidationError("design must be finite")

    @property
    def n_rows(self) -> int:
        return self.Z.shape[0]

    @property
    def n_params(self) -> int:
        return self.Z.shape[1]


@dataclass(frozen=True)
class LogisticFitResult:
    alpha: np.ndarray
    loglik: float
    score_norm: float
    iterations: int
    converged: bool
    neg_hessian: np.ndarray


def missingness_design(aug: AugmentedDataset) -> LogisticDesign:
    """The (1, x_miss, y) design over augmented rows, with current weights."""
    return LogisticDesign(Z=aug.miss_design(), r=aug.r.astype(np.float64), weights=aug.weights)


def logistic_prob(alpha, z) -> np.ndarray:
    """P(R = 1) under the logistic model; z is one row or a matrix."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return expit(np.asarray(z, dtype=np.float64) @ alpha)


def logit_log_likelihood(alpha, design: LogisticDesign) -> float:
    alpha = np.asarray(alpha, dtype=np.float64)
    return kernels.logit_loglik(alpha, design.Z, design.r, design.weights)


def logit_score(alpha, design: LogisticDesign) -> np.ndarray:
    """Weighted score sum of w (r - p) z."""
    alpha = np.asarray(alpha, dtype=np.float64)
    _, score, _ = kernels.logit_derivs(alpha, design.Z, design.r, design.weights)
    return score


def logit_neg_hessian(alpha, design: LogisticDesign) -> np.ndarray:
    """Weighted negative Hessian sum of w p (1 - p) z z'."""
    alpha = np.asarray(alpha, dtype=np.float64)
    _, _, nh = kernels.logit_derivs(alpha, design.Z, design.r, design.weights)
    return nh


def logit_row_scores(alpha, design: LogisticDesign) -> np.ndarray:
    """Unweighted per-row scores (r - p) z, shape (m, k)."""
    pr = logistic_prob(alpha, design.Z)
    return (design.r - pr)[:, None] * design.Z


def _fit_logit_raw(Z, r, w, init_vec, options: FitOptions):
    """Array-level weighted fit; returns (vec, loglik, score_norm, iters, nh)."""
    w_pos = float(np.dot(w, r))
    w_neg = float(np.dot(w, 1.0 - r))
    if w_pos <= 0.0 or w_neg <= 0.0:
        raise DegenerateDataError("a response class carries zero total weight")

    if init_vec is None:
        init_vec = np.zeros(Z.shape[1])
        if np.all(Z[:, 0] == 1.0):
            init_vec[0] = logit(w_pos / (w_pos + w_neg))

    def eval_derivs(vec):
        f, score, nh = kernels.logit_derivs(vec, Z, r, w)
        return f, score, nh, True

    def eval_value(vec):
        return kernels.logit_loglik(vec, Z, r, w), True

    return newton_maximize(eval_derivs, eval_value, init_vec, options, stage="missingness-model")


def fit_logistic_weighted(
    design: LogisticDesign,
    init: Optional[np.ndarray] = None,
    options: Optional[FitOptions] = None,
) -> LogisticFitResult:
    """Maximize the weighted logistic log-likelihood by damped Newton.

    Raises DegenerateDataError when either response class has zero total
    weight, SeparationError when estimates diverge (e.g. perfectly
    separated data), NonConvergenceError on budget exhaustion.
    """
    options = options or FitOptions()
    start = None if init is None else np.asarray(init, dtype=np.float64)
    vec, f, score_norm, iters, nh = _fit_logit_raw(
        design.Z, design.r, design.weights, start, options
    )
    return LogisticFitResult(
        alpha=vec,
        loglik=f,
        score_norm=score_norm,
        iterations=iters,
        converged=True,
        neg_hessian=nh,
    )
