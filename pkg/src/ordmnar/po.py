"""Weighted proportional-odds (cumulative logit) model.

Descending convention throughout: logit P(Y > j) = theta_j + x'beta for
j = 1..J-1. Category probabilities are differences of adjacent sigmoids,
pi_1 = 1 - s(eta_1), pi_j = s(eta_{j-1}) - s(eta_j), pi_J = s(eta_{J-1}),
positive exactly when theta is strictly decreasing. Fitting maximizes the
row-weighted log-likelihood by damped Newton; weights may be fractional
(EM posterior weights) or all ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import expit, logit

from . import kernels
from ._newton import FitOptions, newton_maximize
from .data import AugmentedDataset
from .exceptions import DegenerateDataError, ProbabilityDomainError
from .params import PoParams

# Jacobian of the per-cut linear predictors (eta_1..eta_{J-1}) in
# (theta, beta): identity in the cut block, the covariate row repeated in
# the slope block.
KappaMatrix = np.ndarray


@dataclass(frozen=True)
class PoFitResult:
    params: PoParams
    loglik: float
    score_norm: float
    iterations: int
    converged: bool
    neg_hessian: np.ndarray


def kappa_matrix(x, n_categories: int) -> KappaMatrix:
    """d(eta)/d(theta, beta) at covariate row x, shape (J-1, J-1+p)."""
    x = np.asarray(x, dtype=np.float64).ravel()
    return np.hstack([np.eye(n_categories - 1), np.tile(x, (n_categories - 1, 1))])


def category_probs(params: PoParams, x) -> np.ndarray:
    """Probabilities of categories 1..J at a single covariate row.

    Raises :class:`ProbabilityDomainError` when any probability is <= 0
    (theta not strictly decreasing, or underflow at extreme predictors).
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    g = expit(params.theta + float(x @ params.beta))
    probs = np.empty(params.n_categories, dtype=np.float64)
    probs[0] = 1.0 - g[0]
    probs[1:-1] = g[:-1] - g[1:]
    probs[-1] = g[-1]
    if np.any(probs <= 0.0):
        raise ProbabilityDomainError(
            f"non-positive category probability at theta={params.theta}, x={x}"
        )
    return probs


def category_prob_matrix(params: PoParams, X) -> np.ndarray:
    """Row-wise category probabilities, shape (m, J).

    Unlike :func:`category_probs` this does not raise on zeros produced by
    underflow; callers that form ratios must check their denominators.
    """
    X = np.asarray(X, dtype=np.float64)
    g = expit(params.theta[None, :] + (X @ params.beta)[:, None])
    probs = np.empty((X.shape[0], params.n_categories), dtype=np.float64)
    probs[:, 0] = 1.0 - g[:, 0]
    probs[:, 1:-1] = g[:, :-1] - g[:, 1:]
    probs[:, -1] = g[:, -1]
    return probs


def po_log_likelihood(params: PoParams, aug: AugmentedDataset) -> float:
    """Weighted log-likelihood; -inf at infeasible parameter points."""
    f, _ = kernels.po_loglik(params.theta, params.beta, aug.y, aug.x, aug.weights)
    return f


def po_score(params: PoParams, aug: AugmentedDataset) -> np.ndarray:
    """Weighted score in (theta, beta)."""
    _, score, _, ok = kernels.po_derivs(params.theta, params.beta, aug.y, aug.x, aug.weights)
    if not ok:
        raise ProbabilityDomainError("score requested at an infeasible parameter point")
    return score


def po_neg_hessian(params: PoParams, aug: AugmentedDataset) -> np.ndarray:
    """Weighted negative Hessian in (theta, beta)."""
    _, _, nh, ok = kernels.po_derivs(params.theta, params.beta, aug.y, aug.x, aug.weights)
    if not ok:
        raise ProbabilityDomainError("neg-Hessian requested at an infeasible parameter point")
    return nh


def po_row_scores(params: PoParams, aug: AugmentedDataset) -> np.ndarray:
    """Unweighted per-row scores in (theta, beta), shape (m, J-1+p).

    Row i holds d log pi_{i, y_i} / d(theta, beta); used by the
    missing-information correction.
    """
    J = params.n_categories
    p = params.n_covariates
    y, X = aug.y, aug.x
    m = y.shape[0]
    xb = X @ params.beta
    m1 = y > 1
    mJ = y < J
    g_hi = np.ones(m)
    g_lo = np.zeros(m)
    g_hi[m1] = expit(params.theta[y[m1] - 2] + xb[m1])
    g_lo[mJ] = expit(params.theta[y[mJ] - 1] + xb[mJ])
    pi = g_hi - g_lo
    if np.any(pi <= 0.0):
        raise ProbabilityDomainError("row scores requested at an infeasible parameter point")
    a = np.where(m1, g_hi * (1.0 - g_hi), 0.0)
    b = np.where(mJ, g_lo * (1.0 - g_lo), 0.0)
    S = np.zeros((m, J - 1 + p))
    rows = np.arange(m)
    S[rows[m1], y[m1] - 2] = (a / pi)[m1]
    S[rows[mJ], y[mJ] - 1] = -(b / pi)[mJ]
    S[:, J - 1:] = X * ((a - b) / pi)[:, None]
    return S


def default_po_init(aug: AugmentedDataset) -> PoParams:
    """Cut points from weighted marginal cumulative frequencies, zero slopes."""
    return PoParams.from_vector(
        _default_init_vector(aug.y, aug.weights, aug.n_categories, aug.x.shape[1]),
        aug.n_categories,
    )


def _default_init_vector(y, w, J: int, p: int) -> np.ndarray:
    totals = np.bincount(y, weights=w, minlength=J + 1)[1:]
    if np.any(totals <= 0.0):
        raise DegenerateDataError("a response category carries zero total weight")
    freqs = totals / totals.sum()
    upper_tail = 1.0 - np.cumsum(freqs)[:-1]
    return np.concatenate([logit(upper_tail), np.zeros(p)])


def _fit_po_raw(y, X, w, J: int, init_vec, options: FitOptions):
    """Array-level weighted fit; returns (vec, loglik, score_norm, iters, nh)."""
    totals = np.bincount(y, weights=w, minlength=J + 1)[1:]
    if np.any(totals <= 0.0):
        raise DegenerateDataError("a response category carries zero total weight")
    k = J - 1

    def eval_derivs(vec):
        return kernels.po_derivs(vec[:k], vec[k:], y, X, w)

    def eval_value(vec):
        return kernels.po_loglik(vec[:k], vec[k:], y, X, w)

    return newton_maximize(eval_derivs, eval_value, init_vec, options, stage="outcome-model")


def fit_po_weighted(
    aug: AugmentedDataset,
    init: Optional[PoParams] = None,
    options: Optional[FitOptions] = None,
) -> PoFitResult:
    """Maximize the weighted proportional-odds log-likelihood.

    Raises DegenerateDataError when a category has zero total weight,
    SeparationError on divergence, NonConvergenceError on budget
    exhaustion.
    """
    options = options or FitOptions()
    J = aug.n_categories
    y, X, w = aug.y, aug.x, aug.weights
    init_vec = (
        init.as_vector() if init is not None else _default_init_vector(y, w, J, X.shape[1])
    )
    vec, f, score_norm, iters, nh = _fit_po_raw(y, X, w, J, init_vec, options)
    return PoFitResult(
        params=PoParams.from_vector(vec, J),
        loglik=f,
        score_norm=score_norm,
        iterations=iters,
        converged=True,
        neg_hessian=nh,
    )
