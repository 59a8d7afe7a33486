"""EM estimation for the joint outcome/missingness model.

The observed-data log-likelihood treats a subject with an observed response
as contributing log pi_{y}(x) + log P(R=0 | x_miss, y) and a
missing-response subject as contributing log sum_j pi_j(x) P(R=1 | x_miss,
j). The E-step turns each missing subject's J candidate rows into posterior
category weights; the M-step alternates a weighted proportional-odds fit
and a weighted logistic fit. Standard errors come from the observed-data
information, assembled as the weighted complete-data information minus the
missing-information correction built from per-row complete-data scores.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.stats import norm

from . import kernels
from ._newton import FitOptions
from .binlogit import (
    LogisticDesign,
    _fit_logit_raw,
    fit_logistic_weighted,
    logit_neg_hessian,
    logit_row_scores,
)
from .data import AugmentedDataset, OrdinalDataset, augment_dataset
from .exceptions import (
    AscentViolationError,
    DegenerateDataError,
    NonConvergenceError,
    NotPositiveDefiniteError,
    ProbabilityDomainError,
    SeparationError,
)
from .params import GammaParams, MissingnessParams, PoParams
from .po import (
    _fit_po_raw,
    default_po_init,
    fit_po_weighted,
    po_neg_hessian,
    po_row_scores,
)


@dataclass(frozen=True)
class EmOptions:
    """Outer-loop controls; ``inner`` governs both M-step Newton fits."""

    outer_tol: float = 1e-6
    max_outer: int = 500
    inner: FitOptions = field(default_factory=FitOptions)
    ci_level: float = 0.95


@dataclass(frozen=True)
class EmFit:
    """Converged EM estimate with observed-data-information inference.

    ``weights`` holds the augmented data carrying the final posterior
    category weights (synchronized with ``gamma``). ``alpha_status`` is
    "ok" normally and "degenerate" when the dataset had no missing
    responses, in which case alpha is NaN and the alpha block of
    ``covariance``/``se``/``ci`` is NaN.
    """

    gamma: GammaParams
    covariance: np.ndarray
    se: np.ndarray
    ci: np.ndarray
    loglik: float
    loglik_trace: np.ndarray
    weights: AugmentedDataset
    iterations: int
    converged: bool
    alpha_status: str


def e_step_weights(gamma: GammaParams, aug: AugmentedDataset) -> AugmentedDataset:
    """One E-step: replace candidate-row weights with posterior category
    probabilities given the current parameters."""
    w, ok = kernels.estep_weights(
        gamma.po.theta, gamma.po.beta, gamma.miss.alpha,
        aug.y, aug.x, aug.miss_design(), aug.group_starts,
    )
    if not ok:
        raise ProbabilityDomainError(
            "posterior weights undefined: non-positive category probability "
            "or underflowed denominator"
        )
    return aug.replace_weights(w)


def observed_data_loglik(gamma: GammaParams, ds: OrdinalDataset) -> float:
    """Log-likelihood of the observed data (responses where seen, plus the
    missingness indicators) at gamma; -inf at infeasible points."""
    aug = augment_dataset(ds)
    return float(
        kernels.obs_loglik(
            gamma.po.theta, gamma.po.beta, gamma.miss.alpha,
            aug.y, aug.x, aug.miss_design(), aug.group_starts,
        )
    )


def louis_information(gamma: GammaParams, aug: AugmentedDataset) -> np.ndarray:
    """Observed-data information at gamma.

    ``aug`` must carry E-step weights computed at the same gamma; then this
    equals the negative Hessian of :func:`observed_data_loglik` exactly (up
    to roundoff). Assembled as the weighted complete-data information,
    block-diagonal in (theta, beta) and alpha, minus the candidate-row
    score dispersion within each missing subject's block.
    """
    design = LogisticDesign(Z=aug.miss_design(), r=aug.r.astype(np.float64), weights=aug.weights)
    nh_po = po_neg_hessian(gamma.po, aug)
    nh_lg = logit_neg_hessian(gamma.miss.alpha, design)
    d1, d2 = nh_po.shape[0], nh_lg.shape[0]
    info = np.zeros((d1 + d2, d1 + d2))
    info[:d1, :d1] = nh_po
    info[d1:, d1:] = nh_lg

    miss = aug.r == 1
    if miss.any():
        J = aug.n_categories
        S = np.hstack([po_row_scores(gamma.po, aug), logit_row_scores(gamma.miss.alpha, design)])
        Sm = S[miss].reshape(-1, J, d1 + d2)
        wm = aug.weights[miss].reshape(-1, J)
        second = np.einsum("gj,gjd,gje->de", wm, Sm, Sm)
        qdot = np.einsum("gj,gjd->gd", wm, Sm)
        info -= second - qdot.T @ qdot
    return info


def covariance_from_information(info: np.ndarray) -> np.ndarray:
    """Invert an information matrix, requiring positive definiteness."""
    try:
        c, low = cho_factor(info)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("information matrix is not positive definite") from exc
    return cho_solve((c, low), np.eye(info.shape[0]))


def se_and_ci(info: np.ndarray, estimates: np.ndarray, level: float = 0.95):
    """Wald standard errors and confidence limits from an information matrix.

    Returns (se, ci) with ci of shape (d, 2). Raises
    :class:`NotPositiveDefiniteError` when the information is singular.
    """
    cov = covariance_from_information(info)
    se = np.sqrt(np.diag(cov))
    z = norm.ppf(0.5 + level / 2.0)
    estimates = np.asarray(estimates, dtype=np.float64)
    ci = np.column_stack([estimates - z * se, estimates + z * se])
    return se, ci


def wald_p_values(estimates, se) -> np.ndarray:
    """Two-sided normal p-values for estimate/se."""
    z = np.abs(np.asarray(estimates, dtype=np.float64) / np.asarray(se, dtype=np.float64))
    return 2.0 * norm.sf(z)


def _init_gamma(ds: OrdinalDataset, aug: AugmentedDataset, options: EmOptions) -> GammaParams:
    """Starting point: complete-case outcome fit (marginal-frequency
    fallback) and a covariates-only missingness fit with zero response
    slope."""
    cc_weights = (aug.r == 0).astype(np.float64)
    try:
        po0 = fit_po_weighted(aug.replace_weights(cc_weights), options=options.inner).params
    except (DegenerateDataError, SeparationError, NonConvergenceError, ProbabilityDomainError):
        po0 = default_po_init(aug)

    q = ds.n_miss_covariates
    Z0 = np.column_stack([np.ones(ds.n_subjects), ds.x_miss])
    try:
        base = fit_logistic_weighted(
            LogisticDesign(Z=Z0, r=ds.missing.astype(np.float64), weights=np.ones(ds.n_subjects)),
            options=options.inner,
        ).alpha
    except (DegenerateDataError, SeparationError, NonConvergenceError):
        base = np.zeros(q + 1)
    return GammaParams(po=po0, miss=MissingnessParams(alpha=np.append(base, 0.0)))


def _complete_data_fit(aug: AugmentedDataset, options: EmOptions) -> EmFit:
    """Degenerate EM: no missing responses, so the outcome fit is a single
    weighted proportional-odds fit and the missingness model is
    unidentifiable (single response class)."""
    res = fit_po_weighted(aug, options=options.inner)
    q = aug.x_miss.shape[1]
    d1 = res.params.theta.shape[0] + res.params.beta.shape[0]
    d = d1 + q + 2
    cov = np.full((d, d), np.nan)
    cov[:d1, :d1] = covariance_from_information(res.neg_hessian)
    se = np.full(d, np.nan)
    se[:d1] = np.sqrt(np.diag(cov[:d1, :d1]))
    z = norm.ppf(0.5 + options.ci_level / 2.0)
    est = np.concatenate([res.params.as_vector(), np.full(q + 2, np.nan)])
    ci = np.column_stack([est - z * se, est + z * se])
    gamma = GammaParams(po=res.params, miss=MissingnessParams(alpha=np.full(q + 2, np.nan)))
    return EmFit(
        gamma=gamma,
        covariance=cov,
        se=se,
        ci=ci,
        loglik=res.loglik,
        loglik_trace=np.array([res.loglik]),
        weights=aug,
        iterations=1,
        converged=True,
        alpha_status="degenerate",
    )


def em_fit(
    ds: OrdinalDataset,
    options: Optional[EmOptions] = None,
    init: Optional[GammaParams] = None,
) -> EmFit:
    """Maximum likelihood for the joint model by EM.

    Outer convergence: sum of absolute parameter changes below
    ``outer_tol``. The observed-data log-likelihood is tracked every
    iteration and must never decrease (a decrease beyond 1e-8 raises
    :class:`AscentViolationError`, which would indicate a bug rather than a
    data problem). Raises NonConvergenceError (tagged with the failing
    stage) when a budget is exhausted. ``init`` overrides the default
    starting point (complete-case fits); useful for warm starts.
    """
    options = options or EmOptions()
    aug = augment_dataset(ds)
    if ds.n_missing == 0:
        return _complete_data_fit(aug, options)

    J = aug.n_categories
    k = J - 1
    y, X = aug.y, aug.x
    Z = aug.miss_design()
    starts = aug.group_starts
    r_float = aug.r.astype(np.float64)

    gamma0 = init if init is not None else _init_gamma(ds, aug, options)
    tb = gamma0.po.as_vector()
    al = gamma0.miss.alpha.copy()

    trace = []
    converged = False
    iterations = 0
    for it in range(1, options.max_outer + 1):
        iterations = it
        w, ok = kernels.estep_weights(tb[:k], tb[k:], al, y, X, Z, starts)
        if not ok:
            raise ProbabilityDomainError(f"posterior weights undefined at iteration {it}")
        tb_new, _, _, _, _ = _fit_po_raw(y, X, w, J, tb, options.inner)
        al_new, _, _, _, _ = _fit_logit_raw(Z, r_float, w, al, options.inner)
        ll = float(kernels.obs_loglik(tb_new[:k], tb_new[k:], al_new, y, X, Z, starts))
        if trace and ll < trace[-1] - 1e-8:
            raise AscentViolationError(
                f"observed-data log-likelihood decreased at iteration {it}: "
                f"{trace[-1]:.10f} -> {ll:.10f}"
            )
        trace.append(ll)
        delta = float(np.sum(np.abs(tb_new - tb)) + np.sum(np.abs(al_new - al)))
        tb, al = tb_new, al_new
        if delta < options.outer_tol:
            converged = True
            break
    if not converged:
        raise NonConvergenceError(
            f"em: parameter changes still {delta:.3e} after {options.max_outer} iterations",
            stage="em",
            iterations=options.max_outer,
        )

    gamma = GammaParams(po=PoParams.from_vector(tb, J), miss=MissingnessParams(alpha=al))
    w, ok = kernels.estep_weights(tb[:k], tb[k:], al, y, X, Z, starts)
    if not ok:
        raise ProbabilityDomainError("posterior weights undefined at the converged estimate")
    aug = aug.replace_weights(w)
    info = louis_information(gamma, aug)
    est = gamma.as_vector()
    se, ci = se_and_ci(info, est, options.ci_level)
    return EmFit(
        gamma=gamma,
        covariance=covariance_from_information(info),
        se=se,
        ci=ci,
        loglik=trace[-1],
        loglik_trace=np.array(trace),
        weights=aug,
        iterations=iterations,
        converged=True,
        alpha_status="ok",
    )
